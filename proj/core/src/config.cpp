#include "manet/config.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "manet/errors.hpp"

namespace manet {

std::string_view to_string(Scheme s) { return s == Scheme::fast ? "fast" : "slow"; }

std::string_view to_string(CodingMode m) { return m == CodingMode::lt ? "lt" : "oracle"; }

Scheme parse_scheme(std::string_view text) {
  if (text == "fast") return Scheme::fast;
  if (text == "slow") return Scheme::slow;
  throw ConfigError("unknown scheme '" + std::string(text) + "' (expected fast|slow)");
}

CodingMode parse_coding_mode(std::string_view text) {
  if (text == "lt") return CodingMode::lt;
  if (text == "oracle") return CodingMode::oracle;
  throw ConfigError("unknown coding mode '" + std::string(text) + "' (expected lt|oracle)");
}

namespace {

void require_positive(double value, std::string_view name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(fmt::format("{} must be a positive finite number, got {}", name, value));
  }
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.n < 2) throw ConfigError(fmt::format("n must be >= 2, got {}", cfg.n));
  if (cfg.n > 0xffffffffLL) throw ConfigError("n exceeds the 32-bit node id range");
  if (cfg.D < 1) throw ConfigError(fmt::format("D must be >= 1, got {}", cfg.D));
  if (cfg.D >= cfg.n) throw ConfigError(fmt::format("D must be < n (D={}, n={})", cfg.D, cfg.n));
  if (cfg.C < 1) throw ConfigError(fmt::format("C must be >= 1, got {}", cfg.C));
  if (cfg.super_slots < 1) {
    throw ConfigError("super_slots must be >= 1: at least one super slot is required");
  }
  require_positive(cfg.W, "W");
  require_positive(cfg.delta, "delta");
  require_positive(cfg.epsilon_code, "epsilon_code");
  require_positive(cfg.c_s, "c_s");
  require_positive(cfg.c1, "c1");
  require_positive(cfg.c2, "c2");
  require_positive(cfg.oracle_exponent, "oracle_exponent");
}

RegimeReport validate_regime(const SimConfig& cfg) {
  RegimeReport report;
  const auto n = static_cast<double>(cfg.n);
  const auto D = static_cast<double>(cfg.D);
  if (cfg.scheme == Scheme::fast) {
    const double lower = std::cbrt(n);
    if (!(D > lower)) {
      report.in_regime = false;
      report.warnings.push_back(
          fmt::format("D={} is below the n^(1/3) proxy ({:.4g}) for D = omega(n^(1/3))", cfg.D, lower));
    }
  } else if (cfg.D < 2) {
    report.in_regime = false;
    report.warnings.push_back(fmt::format("D={} is too small: D must be omega(1) (proxy D >= 2)", cfg.D));
  }
  if (!(D < n / 2.0)) {
    report.in_regime = false;
    report.warnings.push_back(
        fmt::format("D={} is not below the n/2 proxy ({:.4g}) for D = o(n)", cfg.D, n / 2.0));
  }
  return report;
}

}  // namespace manet
