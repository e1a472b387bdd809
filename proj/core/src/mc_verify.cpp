#include "manet/mc_verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "manet/errors.hpp"

namespace manet {

namespace {

void finish(LemmaCheckResult& r, std::int64_t hits) {
  r.empirical = static_cast<double>(hits) / r.trials;
  r.std_error = std::sqrt(r.empirical * (1.0 - r.empirical) / r.trials);
  r.pass = r.empirical <= r.bound + 3.0 * r.std_error;
}

void check_trials(int trials) {
  if (trials < kMinTrials) {
    throw ParameterError(fmt::format("at least {} trials are required, got {}", kMinTrials, trials));
  }
}

void check_mu(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be finite and >= 0");
}

// Sum of ceil(10 mu) (at least 10) Bernoulli(mu / count) terms; 0 when mu = 0.
std::int64_t term_count(double mu) {
  if (mu == 0.0) return 0;
  return std::max<std::int64_t>(10, static_cast<std::int64_t>(std::ceil(10.0 * mu)));
}

std::int64_t bernoulli_sum(std::int64_t count, double p, Rng& rng) {
  std::int64_t s = 0;
  for (std::int64_t i = 0; i < count; ++i) s += rng.bernoulli(p) ? 1 : 0;
  return s;
}

}  // namespace

std::string_view to_string(Lemma lemma) {
  switch (lemma) {
    case Lemma::chernoff_lower: return "chernoff_lower";
    case Lemma::chernoff_upper: return "chernoff_upper";
    case Lemma::balls_bins_broadcast: return "balls_bins_broadcast";
    case Lemma::balls_bins_trashcan: return "balls_bins_trashcan";
  }
  return "unknown";
}

Lemma parse_lemma(std::string_view text) {
  for (Lemma l : {Lemma::chernoff_lower, Lemma::chernoff_upper, Lemma::balls_bins_broadcast,
                  Lemma::balls_bins_trashcan}) {
    if (text == to_string(l)) return l;
  }
  throw ConfigError(fmt::format("unknown lemma '{}'", text));
}

LemmaCheckResult check_chernoff_lower(double mu, double delta, int trials, Rng& rng) {
  check_trials(trials);
  check_mu(mu);
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("lower-tail delta must lie in (0, 1)");
  LemmaCheckResult r;
  r.lemma = Lemma::chernoff_lower;
  r.mu = mu;
  r.delta = delta;
  r.trials = trials;
  r.bound = std::exp(-delta * delta * mu / 2.0);
  const std::int64_t count = term_count(mu);
  r.n = count;
  const double p = count > 0 ? mu / static_cast<double>(count) : 0.0;
  r.p = p;
  const double threshold = (1.0 - delta) * mu;
  std::int64_t hits = 0;
  for (int t = 0; t < trials; ++t) {
    if (static_cast<double>(bernoulli_sum(count, p, rng)) < threshold) ++hits;
  }
  finish(r, hits);
  return r;
}

LemmaCheckResult check_chernoff_upper(double mu, double delta, int trials, Rng& rng) {
  check_trials(trials);
  check_mu(mu);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("upper-tail delta must be positive");
  LemmaCheckResult r;
  r.lemma = Lemma::chernoff_upper;
  r.mu = mu;
  r.delta = delta;
  r.trials = trials;
  r.bound = std::exp(-delta * delta * mu / 3.0);
  const std::int64_t count = term_count(mu);
  r.n = count;
  const double p = count > 0 ? mu / static_cast<double>(count) : 0.0;
  r.p = p;
  const double threshold = (1.0 + delta) * mu;
  std::int64_t hits = 0;
  for (int t = 0; t < trials; ++t) {
    if (static_cast<double>(bernoulli_sum(count, p, rng)) > threshold) ++hits;
  }
  finish(r, hits);
  return r;
}

std::pair<LemmaCheckResult, LemmaCheckResult> check_chernoff(double mu, double delta, int trials,
                                                             Rng& rng) {
  auto lower = check_chernoff_lower(mu, delta, trials, rng);
  auto upper = check_chernoff_upper(mu, delta, trials, rng);
  return {lower, upper};
}

LemmaCheckResult check_balls_bins_broadcast(std::int64_t m, std::int64_t h, std::int64_t n,
                                            double delta, int trials, Rng& rng) {
  check_trials(trials);
  if (m < 1) throw ParameterError("need at least one bin");
  if (h < 0 || h > m) throw ParameterError(fmt::format("h = {} must lie in [0, m = {}]", h, m));
  if (n < 0) throw ParameterError("round count must be nonnegative");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be >= 0");

  LemmaCheckResult r;
  r.lemma = Lemma::balls_bins_broadcast;
  r.m = m;
  r.h = h;
  r.n = n;
  r.delta = delta;
  r.trials = trials;
  const double md = static_cast<double>(m);
  const double p1 = -std::expm1(-static_cast<double>(n) * static_cast<double>(h) / md);
  r.p = p1;
  r.bound = 2.0 * std::exp(-delta * delta * md * p1 / 3.0);
  const double threshold = (1.0 - delta) * md * p1;

  std::vector<std::uint32_t> bins(static_cast<std::size_t>(m));
  std::vector<std::uint32_t> stamp(static_cast<std::size_t>(m), 0);
  std::int64_t hits = 0;
  for (int t = 0; t < trials; ++t) {
    const auto epoch = static_cast<std::uint32_t>(t + 1);
    std::int64_t nonempty = 0;
    for (std::size_t b = 0; b < bins.size(); ++b) bins[b] = static_cast<std::uint32_t>(b);
    for (std::int64_t round = 0; round < n; ++round) {
      // Partial Fisher-Yates: the first h entries are a uniform h-subset.
      for (std::int64_t i = 0; i < h; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m - i)));
        std::swap(bins[static_cast<std::size_t>(i)], bins[j]);
        auto& s = stamp[bins[static_cast<std::size_t>(i)]];
        if (s != epoch) {
          s = epoch;
          ++nonempty;
        }
      }
    }
    if (static_cast<double>(nonempty) <= threshold) ++hits;
  }
  finish(r, hits);
  return r;
}

LemmaCheckResult check_balls_bins_trashcan(std::int64_t m, double p, std::int64_t n, double delta,
                                           int trials, Rng& rng) {
  check_trials(trials);
  if (m < 1) throw ParameterError("need at least one bin");
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  if (n < 0) throw ParameterError("ball count must be nonnegative");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be >= 0");

  LemmaCheckResult r;
  r.lemma = Lemma::balls_bins_trashcan;
  r.m = m;
  r.n = n;
  r.p = p;
  r.delta = delta;
  r.trials = trials;
  const double md = static_cast<double>(m);
  const double p2 = -std::expm1(-static_cast<double>(n) * p / md);
  r.mu = md * p2;
  r.bound = 2.0 * std::exp(-delta * delta * md * p2 / 3.0);
  const double threshold = (1.0 - delta) * md * p2;

  std::vector<std::uint32_t> stamp(static_cast<std::size_t>(m), 0);
  std::int64_t hits = 0;
  for (int t = 0; t < trials; ++t) {
    const auto epoch = static_cast<std::uint32_t>(t + 1);
    std::int64_t nonempty = 0;
    for (std::int64_t ball = 0; ball < n; ++ball) {
      if (!rng.bernoulli(p)) continue;
      auto& s = stamp[rng.below(static_cast<std::uint64_t>(m))];
      if (s != epoch) {
        s = epoch;
        ++nonempty;
      }
    }
    if (static_cast<double>(nonempty) <= threshold) ++hits;
  }
  finish(r, hits);
  return r;
}

double broadcast_poisson_tv(std::int64_t m, std::int64_t h, std::int64_t n, int trials, Rng& rng) {
  if (m < 1 || h < 0 || h > m || n < 0) throw ParameterError("invalid balls-and-bins parameters");
  if (trials < 1) throw ParameterError("need at least one trial");
  std::vector<std::uint32_t> bins(static_cast<std::size_t>(m));
  std::vector<std::uint32_t> load(static_cast<std::size_t>(m));
  std::vector<double> histogram;
  for (int t = 0; t < trials; ++t) {
    std::fill(load.begin(), load.end(), 0U);
    for (std::size_t b = 0; b < bins.size(); ++b) bins[b] = static_cast<std::uint32_t>(b);
    for (std::int64_t round = 0; round < n; ++round) {
      for (std::int64_t i = 0; i < h; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m - i)));
        std::swap(bins[static_cast<std::size_t>(i)], bins[j]);
        ++load[bins[static_cast<std::size_t>(i)]];
      }
    }
    for (auto l : load) {
      if (l >= histogram.size()) histogram.resize(l + 1, 0.0);
      histogram[l] += 1.0;
    }
  }
  const double total = static_cast<double>(m) * trials;
  const double rate = static_cast<double>(n) * static_cast<double>(h) / static_cast<double>(m);
  double tv = 0.0;
  double covered = 0.0;
  double pmf = std::exp(-rate);
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    tv += std::abs(histogram[k] / total - pmf);
    covered += pmf;
    pmf *= rate / static_cast<double>(k + 1);
  }
  tv += std::max(0.0, 1.0 - covered);  // Poisson mass beyond the largest observed load
  return 0.5 * tv;
}

LemmaCheckResult run_instance(const LemmaInstance& in, int trials, Rng& rng) {
  switch (in.lemma) {
    case Lemma::chernoff_lower: return check_chernoff_lower(in.mu, in.delta, trials, rng);
    case Lemma::chernoff_upper: return check_chernoff_upper(in.mu, in.delta, trials, rng);
    case Lemma::balls_bins_broadcast:
      return check_balls_bins_broadcast(in.m, in.h, in.n, in.delta, trials, rng);
    case Lemma::balls_bins_trashcan:
      return check_balls_bins_trashcan(in.m, in.p, in.n, in.delta, trials, rng);
  }
  throw ParameterError("unknown lemma");
}

std::vector<LemmaInstance> default_lemma_grid() {
  using L = Lemma;
  std::vector<LemmaInstance> grid = {
      {L::chernoff_lower, 0, 0, 0, 0.0, 0.5, 30.0},
      {L::chernoff_lower, 0, 0, 0, 0.0, 0.2, 100.0},
      {L::chernoff_lower, 0, 0, 0, 0.0, 0.9, 10.0},
      {L::chernoff_upper, 0, 0, 0, 0.0, 1.0, 30.0},
      {L::chernoff_upper, 0, 0, 0, 0.0, 0.2, 100.0},
      {L::chernoff_upper, 0, 0, 0, 0.0, 2.0, 10.0},
      {L::balls_bins_broadcast, 1000, 100, 10, 0.0, 0.2, 0.0},
      {L::balls_bins_broadcast, 100, 10, 20, 0.0, 0.1, 0.0},
      {L::balls_bins_broadcast, 500, 5, 100, 0.0, 0.3, 0.0},
      {L::balls_bins_trashcan, 100, 0, 200, 0.5, 0.2, 0.0},
      {L::balls_bins_trashcan, 1000, 0, 500, 0.9, 0.1, 0.0},
  };
  // Receiving step of the fast scheme at D = 1000, M = 10: 16D/(25M) bins,
  // 5D balls, each landing with probability 168/(1375M).
  const double D = 1000.0;
  const double M = 10.0;
  LemmaInstance receive;
  receive.lemma = L::balls_bins_trashcan;
  receive.m = std::llround(16.0 * D / (25.0 * M));
  receive.p = 168.0 / (1375.0 * M);
  receive.n = std::llround(5.0 * D);
  receive.delta = 1.0 / 6.0;
  grid.push_back(receive);
  return grid;
}

std::vector<LemmaCheckResult> run_lemma_grid(std::span<const LemmaInstance> grid, int trials,
                                             std::uint64_t seed) {
  std::vector<LemmaCheckResult> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    out.push_back(run_instance(grid[i], trials, rng));
  }
  return out;
}

void write_lemma_csv(std::ostream& out, std::span<const LemmaCheckResult> results) {
  out << "lemma,m,h,n,p,delta,mu,trials,empirical,std_error,bound,pass\n";
  for (const auto& r : results) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.lemma), r.m, r.h, r.n,
                       r.p, r.delta, r.mu, r.trials, r.empirical, r.std_error, r.bound,
                       r.pass ? "true" : "false");
  }
}

}  // namespace manet
