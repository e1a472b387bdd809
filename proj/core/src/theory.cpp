#include "manet/theory.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "manet/errors.hpp"
#include "manet/geometry.hpp"

namespace manet {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

Heuristic clamp(double lambda, double L) {
  if (L > 0.5) return {lambda, 0.5, true};
  return {lambda, L, false};
}

}  // namespace

Heuristic heuristic_fast(double n, double D, double W, double c1) {
  require_positive(n, "n");
  require_positive(D, "D");
  require_positive(W, "W");
  require_positive(c1, "c1");
  return clamp(std::sqrt(kPi * W * D / (c1 * n)), std::pow(c1 * kPi * W * n * D, -0.25));
}

Heuristic heuristic_slow(double n, double D, double W, double c2) {
  require_positive(n, "n");
  require_positive(D, "D");
  require_positive(W, "W");
  require_positive(c2, "c2");
  return clamp(std::cbrt(kPi * W * D / (c2 * c2 * n)),
               std::cbrt(1.0 / (c2 * kPi * W)) * std::pow(n * D * D, -1.0 / 6.0));
}

double transport_rate(Scheme scheme, double L, double n, double c) {
  require_positive(L, "L");
  require_positive(n, "n");
  require_positive(c, "c");
  return scheme == Scheme::fast ? 1.0 / (c * L * L * n) : 1.0 / (c * L * std::sqrt(n));
}

double virtual_channel_rate(Scheme scheme, double L, double n, double D, double W, double c) {
  const double erasure = W * hit_probability(L, std::llround(D));
  return std::min(erasure, transport_rate(scheme, L, n, c));
}

double no_relay_bound_fast(double n, double W, double T, double delta) {
  return 8.0 * std::numbers::sqrt2 / delta * W * T * std::sqrt(n);
}

double upper_bound_fast(double n, double D, double W, double T, double delta) {
  return no_relay_bound_fast(n, W, T, delta) * (std::sqrt(D) + 1.0);
}

double no_relay_bound_slow(double n, double W, double T, double delta) {
  return 4.0 * std::cbrt(2.0) * W * T * std::pow(delta, -2.0 / 3.0) * std::pow(n, 2.0 / 3.0);
}

double upper_bound_slow(double n, double D, double W, double T, double delta) {
  return no_relay_bound_slow(n, W, T, delta) * (std::cbrt(D) + 1.0);
}

double target_rate_fast(double n, double D, double W, int C) {
  return 9.0 * W / (500.0 * C) * std::sqrt(D / n);
}

double target_rate_slow(double n, double D, double W, int C, double c_s) {
  return 9.0 * W / (440.0 * c_s * C) * std::cbrt(D / n);
}

BoundReport bound_report(Scheme scheme, double n, double D, double W, double delta, double T,
                         double c, int C, double c_s) {
  require_positive(n, "n");
  require_positive(D, "D");
  require_positive(W, "W");
  require_positive(delta, "delta");
  require_positive(T, "T");
  require_positive(c, "c");
  require_positive(c_s, "c_s");
  if (C < 1) throw DomainError("C must be at least 1");

  BoundReport r;
  r.regime = scheme;
  r.n = n;
  r.D = D;
  r.W = W;
  r.T = T;
  r.delta = delta;
  r.c = c;

  Heuristic h;
  if (scheme == Scheme::fast) {
    h = heuristic_fast(n, D, W, c);
    r.upper_bound_total = upper_bound_fast(n, D, W, T, delta);
    r.no_relay_bound_total = no_relay_bound_fast(n, W, T, delta);
    r.target_rate = target_rate_fast(n, D, W, C);
    r.b = h.L_star * std::pow(n * D, 0.25);
  } else {
    h = heuristic_slow(n, D, W, c);
    r.upper_bound_total = upper_bound_slow(n, D, W, T, delta);
    r.no_relay_bound_total = no_relay_bound_slow(n, W, T, delta);
    r.target_rate = target_rate_slow(n, D, W, C, c_s);
    r.b = h.L_star * std::pow(n * D * D, 1.0 / 6.0);
  }
  r.lambda_heuristic = h.lambda;
  r.L_star = h.L_star;
  r.bound_per_pair = r.upper_bound_total / (n * T);

  if (h.clamped) r.warnings.emplace_back("optimal hitting distance exceeds 1/2; clamped to 1/2");
  SimConfig probe;
  probe.scheme = scheme;
  probe.n = std::llround(n);
  probe.D = std::llround(D);
  for (auto& w : validate_regime(probe).warnings) r.warnings.push_back(std::move(w));
  return r;
}

std::string to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["regime"] = std::string(to_string(r.regime));
  j["n"] = r.n;
  j["D"] = r.D;
  j["W"] = r.W;
  j["T"] = r.T;
  j["delta"] = r.delta;
  j[r.regime == Scheme::fast ? "c1" : "c2"] = r.c;
  j[r.regime == Scheme::fast ? "b1" : "b2"] = r.b;
  j["lambda_heuristic"] = r.lambda_heuristic;
  j["L_star"] = r.L_star;
  j["upper_bound_total"] = r.upper_bound_total;
  j["no_relay_bound_total"] = r.no_relay_bound_total;
  j["bound_per_pair"] = r.bound_per_pair;
  j["target_rate"] = r.target_rate;
  j["warnings"] = r.warnings;
  return j.dump(2);
}

}  // namespace manet
