#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "manet/geometry.hpp"

namespace manet {

/// Column/row of a cell: column = floor(x g), row = floor(y g).
struct CellCoord {
  int col = 0;
  int row = 0;

  friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

/// g x g partition of the unit square into half-open cells.
///
/// Occupancy is stored as a counting-sort bucket array so a rebuild is two
/// linear passes and no allocation once the grid has seen n nodes.
class CellGrid {
 public:
  explicit CellGrid(int side_count = 1);

  int side_count() const noexcept { return side_; }
  double cell_side() const noexcept { return 1.0 / side_; }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(side_) * side_; }
  std::size_t node_count() const noexcept { return cell_of_.size(); }

  /// Average number of nodes per cell, n / g^2.
  double mean_occupancy() const noexcept;

  std::size_t cell_of(NodeId node) const { return cell_of_[node]; }
  std::size_t occupancy(std::size_t cell) const { return start_[cell + 1] - start_[cell]; }
  std::span<const NodeId> occupants(std::size_t cell) const;

  std::size_t index(CellCoord c) const noexcept {
    return static_cast<std::size_t>(c.col) * side_ + static_cast<std::size_t>(c.row);
  }
  CellCoord coord(std::size_t cell) const noexcept {
    return {static_cast<int>(cell / side_), static_cast<int>(cell % side_)};
  }
  CellCoord coord_of(Position p) const noexcept;

  void rebuild(std::span<const Position> positions);

 private:
  int side_;
  std::vector<std::uint32_t> cell_of_;
  std::vector<std::size_t> start_;
  std::vector<NodeId> members_;
};

CellGrid build_grid(std::span<const Position> positions, int side_count);

/// Rounds an ideal (generally irrational) side count to an integer >= 1.
/// With `reuse_on_torus` the result is instead the nearest positive multiple
/// of 3, the only sizes for which the 3x3 mini-slot reuse pattern stays
/// interference-free across the wraparound seam.
int round_side_count(double ideal, bool reuse_on_torus);

}  // namespace manet
