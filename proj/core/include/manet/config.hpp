#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "manet/geometry.hpp"

namespace manet {

enum class Scheme { fast, slow };
enum class CodingMode { lt, oracle };

std::string_view to_string(Scheme s);
std::string_view to_string(CodingMode m);
Scheme parse_scheme(std::string_view text);
CodingMode parse_coding_mode(std::string_view text);

/// Every parameter of one simulation run.
struct SimConfig {
  std::string run_id;
  std::int64_t n = 1024;         ///< node count (= number of S-D pairs)
  std::int64_t D = 32;           ///< delay parameter, slots
  double W = 1.0;                ///< bits per successful transmission per slot
  double delta = 0.4;            ///< protocol-model guard zone
  int C = 9;                     ///< mini-slots per slot
  Scheme scheme = Scheme::fast;
  CodingMode coding_mode = CodingMode::oracle;
  Geometry geometry = Geometry::torus;
  double epsilon_code = 1.0 / 6.0;  ///< decode overhead of the rateless code
  double c_s = 1.0;                 ///< highway throughput constant (slow scheme)
  std::uint64_t seed = 1;
  std::int64_t super_slots = 1;

  double c1 = 1.0;               ///< fast virtual-channel constant
  double c2 = 1.0;               ///< slow virtual-channel constant
  double oracle_exponent = 1.0;  ///< a in the oracle's 1 / k^a failure rate

  /// Run the protocol model on every scheduled mini-slot and throw
  /// InvariantViolation on the first inadmissible transmission.
  bool check_protocol = false;
};

/// Throws ConfigError when a field is out of range.
void validate(const SimConfig& cfg);

/// Finite-n stand-in for the asymptotic delay conditions of each scheme.
struct RegimeReport {
  bool in_regime = true;
  std::vector<std::string> warnings;
};

/// fast: n^(1/3) < D < n/2; slow: 2 <= D < n/2. Never throws.
RegimeReport validate_regime(const SimConfig& cfg);

}  // namespace manet
