#include "manet/grid.hpp"

#include <algorithm>
#include <cmath>

#include "manet/errors.hpp"

namespace manet {

CellGrid::CellGrid(int side_count) : side_(side_count) {
  if (side_count < 1) throw ConfigError("grid side count must be >= 1");
  start_.assign(cell_count() + 1, 0);
}

double CellGrid::mean_occupancy() const noexcept {
  return static_cast<double>(node_count()) / static_cast<double>(cell_count());
}

std::span<const NodeId> CellGrid::occupants(std::size_t cell) const {
  return std::span<const NodeId>(members_).subspan(start_[cell], occupancy(cell));
}

CellCoord CellGrid::coord_of(Position p) const noexcept {
  // x g can round up to g for x just below 1.
  const int col = std::min(static_cast<int>(p.x * side_), side_ - 1);
  const int row = std::min(static_cast<int>(p.y * side_), side_ - 1);
  return {col, row};
}

void CellGrid::rebuild(std::span<const Position> positions) {
  const std::size_t n = positions.size();
  cell_of_.resize(n);
  members_.resize(n);
  std::fill(start_.begin(), start_.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = index(coord_of(positions[i]));
    cell_of_[i] = static_cast<std::uint32_t>(c);
    ++start_[c + 1];
  }
  for (std::size_t c = 0; c < cell_count(); ++c) start_[c + 1] += start_[c];
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) members_[fill[cell_of_[i]]++] = static_cast<NodeId>(i);
}

CellGrid build_grid(std::span<const Position> positions, int side_count) {
  CellGrid grid(side_count);
  grid.rebuild(positions);
  return grid;
}

int round_side_count(double ideal, bool reuse_on_torus) {
  if (!(ideal > 0.0)) throw ConfigError("ideal grid side must be positive");
  if (reuse_on_torus) {
    const auto multiple = static_cast<int>(std::lround(ideal / 3.0));
    return 3 * std::max(1, multiple);
  }
  return std::max(1, static_cast<int>(std::lround(ideal)));
}

}  // namespace manet
