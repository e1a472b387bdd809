#include "manet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "manet/errors.hpp"
#include "manet/scheme_fast.hpp"
#include "manet/scheme_slow.hpp"
#include "manet/theory.hpp"

namespace manet {

namespace {

struct Milestones {
  double duplicated = 0.0;  ///< A_i target
  double received = 0.0;    ///< B_i target
};

template <typename SchemeT>
void run_scheme(SchemeT& scheme, const SimConfig& cfg, const Milestones& milestones,
                std::vector<double>& bits, RunResult& result) {
  RunStreams streams(cfg.seed);
  const auto n = static_cast<std::size_t>(cfg.n);
  std::size_t decoded = 0;
  std::size_t duplicated = 0;
  std::size_t received = 0;
  double good = 0.0;
  for (std::int64_t g = 0; g < cfg.super_slots; ++g) {
    const SuperSlotReport report = scheme.run_super_slot(static_cast<std::uint64_t>(g), streams);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = report.sources[i];
      bits[i] += s.delivered_bits;
      decoded += s.decoded ? 1 : 0;
      duplicated += s.duplicated >= milestones.duplicated ? 1 : 0;
      received += s.distinct_delivered >= milestones.received ? 1 : 0;
    }
    good += report.good_cell_fraction;
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(cfg.super_slots);
  result.delivery_prob = static_cast<double>(decoded) / pairs;
  result.duplicated_fraction = static_cast<double>(duplicated) / pairs;
  result.received_fraction = static_cast<double>(received) / pairs;
  result.good_cell_fraction = good / static_cast<double>(cfg.super_slots);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

RunResult run(const SimConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.config = cfg;

  const auto n = static_cast<std::size_t>(cfg.n);
  const double D = static_cast<double>(cfg.D);
  std::vector<double> bits(n, 0.0);
  std::int64_t slots_per_super = 0;
  double c = 1.0;
  if (cfg.scheme == Scheme::fast) {
    fast::FastScheme scheme(cfg);
    const double M = scheme.parameters().M;
    run_scheme(scheme, cfg, {16.0 * D / (25.0 * M), 7.0 * D / (25.0 * M)}, bits, result);
    slots_per_super = 6 * cfg.D;
    c = cfg.c1;
  } else {
    slow::SlowScheme scheme(cfg);
    run_scheme(scheme, cfg, {0.8 * D, 0.5 * D}, bits, result);
    slots_per_super = 16 * cfg.D;
    c = cfg.c2;
  }
  result.total_slots = slots_per_super * cfg.super_slots;
  const double T = static_cast<double>(result.total_slots);

  double sum = 0.0;
  double lo = bits.front();
  for (double b : bits) {
    sum += b;
    lo = std::min(lo, b);
  }
  result.lambda_min = lo / T;
  result.lambda_mean = sum / static_cast<double>(n) / T;

  const BoundReport bounds = bound_report(cfg.scheme, static_cast<double>(cfg.n), D, cfg.W,
                                          cfg.delta, T, c, cfg.C, cfg.c_s);
  result.bound_per_pair = bounds.bound_per_pair;
  result.heuristic_lambda = bounds.lambda_heuristic;
  result.L_star = bounds.L_star;
  result.paper_target_lambda = bounds.target_rate;

  if (!(result.lambda_mean <= result.bound_per_pair)) {
    throw InvariantViolation(fmt::format("measured throughput {} exceeds the upper bound {}",
                                         result.lambda_mean, result.bound_per_pair));
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run_captured(const SimConfig& cfg) {
  try {
    return run(cfg);
  } catch (const Error& e) {
    RunResult result;
    result.config = cfg;
    result.status = "error:" + std::string(e.code());
    result.error_message = e.what();
    return result;
  }
}

std::vector<RunResult> sweep(std::span<const SimConfig> grid, unsigned jobs) {
  std::vector<RunResult> results(grid.size());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1U, jobs), std::max<std::size_t>(1, grid.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) results[i] = run_captured(grid[i]);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return results;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "run_id",        "seed",        "scheme",         "n",
      "D",             "W",           "delta",          "C",
      "coding_mode",   "geometry",    "T_s",            "lambda_min",
      "lambda_mean",   "delivery_prob", "bound_per_pair", "heuristic_lambda",
      "L_star",        "paper_target_lambda", "status",  "wall_time_s"};
  return columns;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string csv_row(const RunResult& r) {
  const auto& c = r.config;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                     csv_escape(c.run_id), c.seed, to_string(c.scheme), c.n, c.D, c.W, c.delta,
                     c.C, to_string(c.coding_mode), to_string(c.geometry), c.super_slots,
                     r.lambda_min, r.lambda_mean, r.delivery_prob, r.bound_per_pair,
                     r.heuristic_lambda, r.L_star, r.paper_target_lambda, csv_escape(r.status),
                     r.wall_time_s);
}

void write_csv(std::ostream& out, std::span<const RunResult> results) {
  out << csv_header() << '\n';
  for (const auto& r : results) out << csv_row(r) << '\n';
}

CsvTable::CsvTable(std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
    : header_(std::move(header)), rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != header_.size()) {
      throw FormatError(fmt::format("CSV row {} has {} cells, header has {}", i + 1,
                                    rows_[i].size(), header_.size()));
    }
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw FormatError(fmt::format("CSV has no column '{}'", name));
  return static_cast<std::size_t>(it - header_.begin());
}

const std::string& CsvTable::at(std::size_t row, std::string_view name) const {
  if (row >= rows_.size()) throw FormatError(fmt::format("CSV row {} out of range", row));
  return rows_[row][column(name)];
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  const std::string& cell = at(row, name);
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw FormatError(fmt::format("CSV cell '{}' in column '{}' is not a number", cell, name));
  }
}

CsvTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return CsvTable(std::move(header), std::move(rows));
}

ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MisuseError("fit_power_law: x and y differ in length");
  const std::size_t N = x.size();
  if (N < 3) throw InsufficientData(fmt::format("a scaling fit needs at least 3 points, got {}", N));
  std::vector<double> lx(N);
  std::vector<double> ly(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(N);
  my /= static_cast<double>(N);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-300)) throw InsufficientData("a scaling fit needs at least two distinct x values");

  ScalingFit fit;
  fit.points = N;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  const double dof = static_cast<double>(N - 2);
  fit.slope_std_error = std::sqrt(sse / dof / sxx);
  const boost::math::students_t dist(dof);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci_low = fit.slope - t * fit.slope_std_error;
  fit.ci_high = fit.slope + t * fit.slope_std_error;
  return fit;
}

ScalingFit fit_scaling(const CsvTable& table, Scheme scheme) {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t excluded = 0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (table.at(r, "status") != "ok") continue;
    if (parse_scheme(table.at(r, "scheme")) != scheme) continue;
    const double lambda = table.number(r, "lambda_min");
    if (!(lambda > 0.0)) {
      ++excluded;
      continue;
    }
    x.push_back(table.number(r, "D") / table.number(r, "n"));
    y.push_back(lambda);
  }
  if (x.size() < 3) {
    throw InsufficientData(fmt::format(
        "{} usable {} rows ({} excluded for zero throughput); at least 3 are needed", x.size(),
        to_string(scheme), excluded));
  }
  ScalingFit fit = fit_power_law(x, y);
  fit.excluded = excluded;
  return fit;
}

std::string to_json(const ScalingFit& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["slope_std_error"] = fit.slope_std_error;
  j["ci95"] = {fit.ci_low, fit.ci_high};
  j["points"] = fit.points;
  j["excluded"] = fit.excluded;
  return j.dump(2);
}

}  // namespace manet
