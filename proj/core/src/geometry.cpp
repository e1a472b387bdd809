#include "manet/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "manet/errors.hpp"

namespace manet {

std::string_view to_string(Geometry g) {
  return g == Geometry::torus ? "torus" : "square";
}

Geometry parse_geometry(std::string_view text) {
  if (text == "torus") return Geometry::torus;
  if (text == "square") return Geometry::square;
  throw ConfigError("unknown geometry '" + std::string(text) + "' (expected torus|square)");
}

std::vector<Position> reshuffle(std::size_t n, Rng& rng) {
  std::vector<Position> out(n);
  reshuffle(out, rng);
  return out;
}

void reshuffle(std::span<Position> positions, Rng& rng) {
  for (auto& p : positions) {
    p.x = rng.uniform();
    p.y = rng.uniform();
  }
}

double distance(Position a, Position b, Geometry geometry) {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  if (geometry == Geometry::torus) {
    dx = std::min(dx, 1.0 - dx);
    dy = std::min(dy, 1.0 - dy);
  }
  return std::hypot(dx, dy);
}

double hit_probability(double L, std::int64_t D) {
  if (!(L >= 0.0) || L > 0.5) {
    throw DomainError("hit_probability: L must lie in [0, 1/2], got " + std::to_string(L));
  }
  if (D < 1) throw DomainError("hit_probability: D must be >= 1");
  const double per_slot = std::numbers::pi * L * L;
  // 1 - (1 - x)^D without cancellation for small x.
  return -std::expm1(static_cast<double>(D) * std::log1p(-per_slot));
}

}  // namespace manet
