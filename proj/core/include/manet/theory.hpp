#pragma once

#include <string>
#include <vector>

#include "manet/config.hpp"

namespace manet {

/// Virtual-channel heuristic: maximal rate and the hitting distance at
/// which the erasure side and the transport side balance.
struct Heuristic {
  double lambda = 0.0;
  double L_star = 0.0;
  bool clamped = false;  ///< L_star exceeded 1/2 and was clamped
};

/// lambda = sqrt(pi W D / (c1 n)), L* = (c1 pi W n D)^(-1/4).
Heuristic heuristic_fast(double n, double D, double W, double c1 = 1.0);

/// lambda = (pi W D / (c2^2 n))^(1/3), L* = (c2 pi W)^(-1/3) (n D^2)^(-1/6).
Heuristic heuristic_slow(double n, double D, double W, double c2 = 1.0);

/// Transport-side rate at hitting distance L: 1 / (c1 L^2 n) (fast) or
/// 1 / (c2 L sqrt(n)) (slow).
double transport_rate(Scheme scheme, double L, double n, double c);

/// min{W * hit_probability(L, D), transport_rate(L)}.
double virtual_channel_rate(Scheme scheme, double L, double n, double D, double W, double c);

/// (8 sqrt 2 / delta) W T sqrt(n): no relaying, fast mobility.
double no_relay_bound_fast(double n, double W, double T, double delta);
/// (8 sqrt 2 W T / delta) sqrt(n) (sqrt(D) + 1).
double upper_bound_fast(double n, double D, double W, double T, double delta);
/// 4 2^(1/3) W T delta^(-2/3) n^(2/3): no relaying, slow mobility.
double no_relay_bound_slow(double n, double W, double T, double delta);
/// 4 2^(1/3) W T delta^(-2/3) n^(2/3) (D^(1/3) + 1).
double upper_bound_slow(double n, double D, double W, double T, double delta);

/// Per-pair rate the achievability results promise for large n:
/// 9W / (500C) sqrt(D/n) (fast), 9W / (440 c_s C) (D/n)^(1/3) (slow).
double target_rate_fast(double n, double D, double W, int C);
double target_rate_slow(double n, double D, double W, int C, double c_s);

struct BoundReport {
  Scheme regime = Scheme::fast;
  double n = 0.0;
  double D = 0.0;
  double W = 0.0;
  double T = 1.0;
  double delta = 0.0;
  double c = 1.0;  ///< c1 or c2
  double b = 0.0;  ///< L* (nD)^(1/4) or L* (nD^2)^(1/6)
  double lambda_heuristic = 0.0;
  double L_star = 0.0;
  double upper_bound_total = 0.0;
  double no_relay_bound_total = 0.0;
  double bound_per_pair = 0.0;  ///< upper_bound_total / (n T)
  double target_rate = 0.0;
  std::vector<std::string> warnings;
};

BoundReport bound_report(Scheme scheme, double n, double D, double W, double delta,
                         double T = 1.0, double c = 1.0, int C = 9, double c_s = 1.0);

std::string to_json(const BoundReport& report);

}  // namespace manet
