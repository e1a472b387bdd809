// Command-line front end: simulate, sweep, bounds, verify-mc, fit.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "manet/config_io.hpp"
#include "manet/errors.hpp"
#include "manet/harness.hpp"
#include "manet/mc_verify.hpp"
#include "manet/theory.hpp"

namespace {

constexpr int kExitError = 2;

void print_error(std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

// Writes via `emit` to `path`, or to stdout when path is "-".
template <typename Emit>
void write_output(const std::string& path, Emit emit) {
  if (path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw manet::ConfigError(fmt::format("cannot write '{}'", path));
  emit(out);
  if (!out) throw manet::ConfigError(fmt::format("failed writing '{}'", path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-constrained MANET throughput simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;

  auto* simulate = app.add_subcommand("simulate", "Run one configuration");
  simulate->add_option("--config", config_path, "Run configuration (JSON)")->required();
  simulate->add_option("--out", out_path, "Results CSV ('-' for stdout)")->required();
  simulate->add_option("--seed", seed, "Override the configured seed");

  auto* sweep = app.add_subcommand("sweep", "Run a sweep document");
  sweep->add_option("--config", config_path, "Sweep configuration (JSON)")->required();
  sweep->add_option("--out", out_path, "Results CSV ('-' for stdout)")->required();
  sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::Range(1U, 1024U));

  std::string scheme_name;
  double n = 0.0;
  double D = 0.0;
  double W = 1.0;
  double delta = 0.4;
  double T = 1.0;
  double c = 1.0;
  int C = 9;
  double c_s = 1.0;
  auto* bounds = app.add_subcommand("bounds", "Print closed-form bounds and heuristics as JSON");
  bounds->add_option("--scheme", scheme_name, "fast or slow")->required();
  bounds->add_option("--n", n, "Node count")->required();
  bounds->add_option("--d", D, "Delay parameter D")->required();
  bounds->add_option("--w", W, "Bits per transmission");
  bounds->add_option("--delta", delta, "Guard zone");
  bounds->add_option("--t", T, "Horizon T in slots");
  bounds->add_option("--c", c, "Virtual-channel constant c1 or c2");
  bounds->add_option("--mini-slots", C, "Mini-slots per slot");
  bounds->add_option("--c-s", c_s, "Highway constant");

  std::optional<int> trials;
  auto* verify = app.add_subcommand("verify-mc", "Monte-Carlo checks of the tail-bound lemmas");
  verify->add_option("--config", config_path, "Lemma grid (JSON); default grid if omitted");
  verify->add_option("--out", out_path, "Results CSV ('-' for stdout)")->required();
  verify->add_option("--trials", trials, "Override the trial count");
  verify->add_option("--seed", seed, "Override the seed");

  std::string in_path;
  auto* fit = app.add_subcommand("fit", "Fit log lambda_min against log(D/n)");
  fit->add_option("--in", in_path, "Results CSV")->required();
  fit->add_option("--scheme", scheme_name, "fast or slow")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitError;
  }

  try {
    if (*simulate) {
      auto cfg = manet::parse_config(manet::read_text_file(config_path));
      if (seed) cfg.seed = *seed;
      const auto result = manet::run(cfg);
      write_output(out_path, [&](std::ostream& out) {
        manet::write_csv(out, std::span<const manet::RunResult>(&result, 1));
      });
    } else if (*sweep) {
      const auto grid = manet::parse_sweep(manet::read_text_file(config_path));
      const auto results = manet::sweep(grid, jobs);
      write_output(out_path, [&](std::ostream& out) { manet::write_csv(out, results); });
      std::size_t failed = 0;
      for (const auto& r : results) {
        if (!r.ok()) {
          ++failed;
          std::cerr << fmt::format("{}: {} {}\n", r.config.run_id, r.status, r.error_message);
        }
      }
      if (failed == results.size()) {
        print_error("sweep", "every run of the sweep failed");
        return kExitError;
      }
    } else if (*bounds) {
      const auto report = manet::bound_report(manet::parse_scheme(scheme_name), n, D, W, delta, T,
                                              c, C, c_s);
      std::cout << manet::to_json(report) << '\n';
    } else if (*verify) {
      manet::McConfig mc;
      if (!config_path.empty()) mc = manet::parse_mc_config(manet::read_text_file(config_path));
      else mc.instances = manet::default_lemma_grid();
      if (trials) mc.trials = *trials;
      if (seed) mc.seed = *seed;
      const auto results = manet::run_lemma_grid(mc.instances, mc.trials, mc.seed);
      write_output(out_path, [&](std::ostream& out) { manet::write_lemma_csv(out, results); });
      std::size_t failed = 0;
      for (const auto& r : results) failed += r.pass ? 0 : 1;
      std::cout << fmt::format("{}/{} lemma checks passed\n", results.size() - failed,
                               results.size());
      if (failed > 0) {
        print_error("lemma_check", fmt::format("{} lemma checks exceeded their bound", failed));
        return 1;
      }
    } else if (*fit) {
      std::ifstream in(in_path);
      if (!in) throw manet::ConfigError(fmt::format("cannot open '{}'", in_path));
      const auto table = manet::read_csv(in);
      std::cout << manet::to_json(manet::fit_scaling(table, manet::parse_scheme(scheme_name)))
                << '\n';
    }
  } catch (const manet::Error& e) {
    print_error(e.code(), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitError;
  }
  return 0;
}
