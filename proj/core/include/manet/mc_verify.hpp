#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "manet/rng.hpp"

namespace manet {

enum class Lemma { chernoff_lower, chernoff_upper, balls_bins_broadcast, balls_bins_trashcan };

std::string_view to_string(Lemma lemma);
Lemma parse_lemma(std::string_view text);

/// Minimum trials for a check to be meaningful.
inline constexpr int kMinTrials = 1000;

/// Outcome of one Monte-Carlo check of a tail bound. Unused parameters are 0.
struct LemmaCheckResult {
  Lemma lemma = Lemma::chernoff_lower;
  std::int64_t m = 0;
  std::int64_t h = 0;
  std::int64_t n = 0;
  double p = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  int trials = 0;
  double empirical = 0.0;  ///< fraction of trials in the tail event
  double std_error = 0.0;  ///< sqrt(p(1 - p) / trials) of the estimate
  double bound = 0.0;      ///< analytic bound on the tail probability
  bool pass = false;       ///< empirical <= bound + 3 std_error
};

/// P(sum < (1 - delta) mu) <= exp(-delta^2 mu / 2); delta in (0, 1).
/// mu is realised as ceil(10 mu) (at least 10) Bernoulli(mu / count) terms.
LemmaCheckResult check_chernoff_lower(double mu, double delta, int trials, Rng& rng);

/// P(sum > (1 + delta) mu) <= exp(-delta^2 mu / 3); delta > 0.
LemmaCheckResult check_chernoff_upper(double mu, double delta, int trials, Rng& rng);

/// Both tails; delta must lie in (0, 1).
std::pair<LemmaCheckResult, LemmaCheckResult> check_chernoff(double mu, double delta, int trials,
                                                             Rng& rng);

/// m bins, n rounds, each round drops one ball into each of h distinct bins.
/// Checks P(N1 <= (1 - delta) m p1) <= 2 exp(-delta^2 m p1 / 3) with
/// p1 = 1 - exp(-n h / m).
LemmaCheckResult check_balls_bins_broadcast(std::int64_t m, std::int64_t h, std::int64_t n,
                                            double delta, int trials, Rng& rng);

/// n balls, each lost to a trash can with probability 1 - p, else uniform
/// over m bins. Checks P(N2 <= (1 - delta) m p2) <= 2 exp(-delta^2 m p2 / 3)
/// with p2 = 1 - exp(-n p / m).
LemmaCheckResult check_balls_bins_trashcan(std::int64_t m, double p, std::int64_t n,
                                           double delta, int trials, Rng& rng);

/// Total-variation distance between the empirical per-bin load of the
/// broadcast process and Poisson(n h / m).
double broadcast_poisson_tv(std::int64_t m, std::int64_t h, std::int64_t n, int trials, Rng& rng);

/// One (lemma, parameters) point of a verification grid.
struct LemmaInstance {
  Lemma lemma = Lemma::chernoff_lower;
  std::int64_t m = 0;
  std::int64_t h = 0;
  std::int64_t n = 0;
  double p = 0.0;
  double delta = 0.0;
  double mu = 0.0;
};

LemmaCheckResult run_instance(const LemmaInstance& instance, int trials, Rng& rng);

/// Default grid: Chernoff tails, broadcast and trash-can instances,
/// including the receiving-step instance of the fast scheme.
std::vector<LemmaInstance> default_lemma_grid();

/// Each instance runs on its own substream derive_seed(seed, i).
std::vector<LemmaCheckResult> run_lemma_grid(std::span<const LemmaInstance> grid, int trials,
                                             std::uint64_t seed);

void write_lemma_csv(std::ostream& out, std::span<const LemmaCheckResult> results);

}  // namespace manet
