#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "manet/rng.hpp"

namespace manet {

using NodeId = std::uint32_t;

enum class Geometry { torus, square };

std::string_view to_string(Geometry g);
Geometry parse_geometry(std::string_view text);

/// Point of the unit square, both coordinates in [0, 1).
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

/// n independent uniform positions. Every slot of the i.i.d. mobility model
/// is one call: positions carry no memory of the previous slot.
std::vector<Position> reshuffle(std::size_t n, Rng& rng);

/// In-place variant for the simulation hot loop; draws x then y per node.
void reshuffle(std::span<Position> positions, Rng& rng);

/// Euclidean distance; on the torus each axis wraps, |d| -> min(|d|, 1 - |d|).
double distance(Position a, Position b, Geometry geometry);

/// Probability that a pair lands within distance L in at least one of D
/// independent slots: 1 - (1 - pi L^2)^D. Exact on the torus for L <= 1/2.
double hit_probability(double L, std::int64_t D);

}  // namespace manet
