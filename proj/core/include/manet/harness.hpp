#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "manet/config.hpp"

namespace manet {

/// Measured and theoretical figures of one simulation run.
struct RunResult {
  SimConfig config;
  std::string status = "ok";  ///< "ok" or "error:<code>"
  std::string error_message;

  double lambda_min = 0.0;     ///< min over sources of delivered bits / T
  double lambda_mean = 0.0;    ///< mean over sources of delivered bits / T
  double delivery_prob = 0.0;  ///< data packets recovered / data packets offered
  double bound_per_pair = 0.0;
  double heuristic_lambda = 0.0;
  double L_star = 0.0;
  double paper_target_lambda = 0.0;
  std::int64_t total_slots = 0;  ///< T

  /// Fractions of (source, super slot) pairs reaching the per-step
  /// milestones of the achievability analysis.
  double duplicated_fraction = 0.0;
  double received_fraction = 0.0;
  double good_cell_fraction = 0.0;

  double wall_time_s = 0.0;

  bool ok() const noexcept { return status == "ok"; }
};

/// Runs cfg.super_slots super slots of the configured scheme. Throws the
/// scheme's errors; throws InvariantViolation if lambda_mean exceeds the
/// matching upper bound.
RunResult run(const SimConfig& cfg);

/// Like run() but converts library errors into an error-status row.
RunResult run_captured(const SimConfig& cfg);

/// Runs every config on up to `jobs` threads. Results come back in input
/// order whatever the completion order.
std::vector<RunResult> sweep(std::span<const SimConfig> grid, unsigned jobs = 1);

/// Fixed column order of the results CSV.
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const RunResult& result);
void write_csv(std::ostream& out, std::span<const RunResult> results);

/// Parsed CSV: header plus rows of raw cells.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t column(std::string_view name) const;  ///< FormatError if absent
  const std::string& at(std::size_t row, std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable read_csv(std::istream& in);

/// Least-squares fit of log y = intercept + slope log x.
struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  double ci_low = 0.0;   ///< 95% Student-t interval on the slope
  double ci_high = 0.0;
  std::size_t points = 0;
  std::size_t excluded = 0;  ///< rows skipped for non-positive throughput
};

/// InsufficientData for fewer than 3 points or no spread in x.
ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// Slope of log(lambda_min) against log(D / n) over the "ok" rows of
/// `scheme`. Rows with lambda_min <= 0 have no logarithm; they are counted
/// in `excluded`.
ScalingFit fit_scaling(const CsvTable& table, Scheme scheme);

std::string to_json(const ScalingFit& fit);

}  // namespace manet
