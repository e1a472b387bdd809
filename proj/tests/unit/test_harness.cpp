#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "manet/errors.hpp"
#include "manet/harness.hpp"

using namespace manet;

namespace {

SimConfig small_fast(std::uint64_t seed = 3) {
  SimConfig cfg;
  cfg.run_id = "t";
  cfg.scheme = Scheme::fast;
  cfg.n = 1024;
  cfg.D = 64;
  cfg.W = 18;
  cfg.seed = seed;
  cfg.super_slots = 2;
  return cfg;
}

std::string without_wall_time(const RunResult& r) {
  RunResult copy = r;
  copy.wall_time_s = 0.0;
  return csv_row(copy);
}

}  // namespace

TEST_CASE("run validates and is deterministic") {
  auto bad = small_fast();
  bad.super_slots = 0;
  CHECK_THROWS_AS(run(bad), ConfigError);
  CHECK(run_captured(bad).status == "error:config");

  const auto a = run(small_fast());
  const auto b = run(small_fast());
  CHECK(without_wall_time(a) == without_wall_time(b));
  CHECK(a.ok());
  CHECK(a.total_slots == 6 * 64 * 2);
  CHECK(a.lambda_min <= a.lambda_mean);
  CHECK(a.lambda_mean <= a.bound_per_pair);
  CHECK(a.delivery_prob >= 0.0);
  CHECK(a.delivery_prob <= 1.0);
  CHECK(a.heuristic_lambda == doctest::Approx(std::sqrt(std::numbers::pi * 18 * 64 / 1024.0)));
}

TEST_CASE("sweep keeps input order and captures errors") {
  std::vector<SimConfig> grid = {small_fast(1), small_fast(2), small_fast(3)};
  grid[1].D = 2;  // below the fast regime: too few packets per block
  grid[1].run_id = "bad";
  const auto serial = sweep(grid, 1);
  const auto parallel = sweep(grid, 4);
  REQUIRE(serial.size() == 3);
  CHECK(serial[0].ok());
  CHECK(serial[1].status == "error:regime");
  CHECK(serial[2].ok());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(serial[i].config.run_id == grid[i].run_id);
    CHECK(without_wall_time(serial[i]) == without_wall_time(parallel[i]));
  }
}

TEST_CASE("CSV layout and round trip") {
  CHECK(csv_header() ==
        "run_id,seed,scheme,n,D,W,delta,C,coding_mode,geometry,T_s,lambda_min,lambda_mean,"
        "delivery_prob,bound_per_pair,heuristic_lambda,L_star,paper_target_lambda,status,"
        "wall_time_s");
  RunResult r;
  r.config = small_fast();
  r.config.run_id = "a,\"b\"";
  r.lambda_min = 0.125;
  r.status = "error:regime";
  std::stringstream io;
  write_csv(io, std::span(&r, 1));
  const auto table = read_csv(io);
  REQUIRE(table.size() == 1);
  CHECK(table.header() == csv_columns());
  CHECK(table.at(0, "run_id") == "a,\"b\"");
  CHECK(table.number(0, "lambda_min") == 0.125);
  CHECK(table.number(0, "n") == 1024);
  CHECK(table.at(0, "status") == "error:regime");
  CHECK_THROWS_AS(table.at(0, "throughput"), FormatError);
  CHECK_THROWS_AS(table.number(0, "scheme"), FormatError);

  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), FormatError);
}

TEST_CASE("power-law fit") {
  const std::vector<double> x = {1e-3, 4e-3, 1e-2, 5e-2};
  std::vector<double> y;
  for (double v : x) y.push_back(std::sqrt(v));
  const auto f = fit_power_law(x, y);
  CHECK(std::abs(f.slope - 0.5) < 1e-12);
  CHECK(std::abs(f.intercept) < 1e-10);
  CHECK(f.slope_std_error < 1e-10);
  CHECK(f.ci_low <= f.slope);
  CHECK(f.ci_high >= f.slope);
  CHECK(f.points == 4);

  std::vector<double> z;
  for (double v : x) z.push_back(0.3 * std::cbrt(v));
  const auto g = fit_power_law(x, z);
  CHECK(g.slope == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(g.intercept == doctest::Approx(std::log(0.3)).epsilon(1e-10));

  // Noisy points: the interval half-width is t(0.975, N - 2) standard errors.
  const std::vector<double> ny = {0.03, 0.07, 0.09, 0.25};
  const auto h = fit_power_law(x, ny);
  CHECK((h.ci_high - h.ci_low) / 2 == doctest::Approx(4.302652729911275 * h.slope_std_error));

  CHECK_THROWS_AS(fit_power_law(std::span(x).first(2), std::span(y).first(2)), InsufficientData);
  const std::vector<double> same = {0.1, 0.1, 0.1};
  CHECK_THROWS_AS(fit_power_law(same, same), InsufficientData);
}

TEST_CASE("scaling fit over a results table") {
  const std::vector<std::string> header = {"scheme", "n", "D", "lambda_min", "status"};
  std::vector<std::vector<std::string>> rows = {
      {"fast", "1024", "32", "0.1767766952966369", "ok"},
      {"fast", "4096", "64", "0.125", "ok"},
      {"fast", "16384", "128", "0.08838834764831845", "ok"},
      {"fast", "65536", "256", "0", "ok"},
      {"fast", "100", "1", "nan", "error:regime"},
      {"slow", "1000", "10", "0.5", "ok"},
  };
  const CsvTable table(header, rows);
  const auto f = fit_scaling(table, Scheme::fast);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.points == 3);
  CHECK(f.excluded == 1);
  CHECK(to_json(f).find("\"excluded\": 1") != std::string::npos);
  CHECK_THROWS_AS(fit_scaling(table, Scheme::slow), InsufficientData);

  rows[1][3] = "0";
  CHECK_THROWS_AS(fit_scaling(CsvTable(header, rows), Scheme::fast), InsufficientData);
}
