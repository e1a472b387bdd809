#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "manet/config.hpp"
#include "manet/grid.hpp"

namespace manet {

struct TransmissionAttempt {
  NodeId tx = 0;
  NodeId rx = 0;
  double radius = 0.0;
  int mini_slot = 0;
};

/// Protocol interference model. Attempt i -> j succeeds iff
/// dist(i, j) <= r_i and dist(k, j) >= (1 + delta) dist(i, j) for every other
/// transmitter k in the batch. Both comparisons are inclusive.
///
/// All attempts must share one mini-slot (MisuseError otherwise); the set of
/// transmitters is the set of distinct `tx` values in the batch.
std::vector<bool> protocol_check(std::span<const TransmissionAttempt> attempts,
                                 std::span<const Position> positions, double delta,
                                 Geometry geometry);

/// Mini-slot assignment of the cells of a g x g grid.
class CellSchedule {
 public:
  CellSchedule(int side_count, int mini_slots) : side_(side_count), mini_slots_(mini_slots) {}

  int side_count() const noexcept { return side_; }
  int mini_slots() const noexcept { return mini_slots_; }

  /// 3 (col mod 3) + (row mod 3).
  int color(CellCoord c) const noexcept { return 3 * (c.col % 3) + (c.row % 3); }
  int color(std::size_t cell) const noexcept {
    return color(CellCoord{static_cast<int>(cell / side_), static_cast<int>(cell % side_)});
  }

 private:
  int side_;
  int mini_slots_;
};

/// 3x3 reuse coloring. Only C = 9 is supported (UnsupportedConfig otherwise).
CellSchedule color_cells(int side_count, int mini_slots);

/// Integer occupancy band of a good cell: [ceil(9M/10) + 1, floor(11M/10)].
struct GoodBand {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(std::size_t count) const noexcept {
    const auto c = static_cast<std::int64_t>(count);
    return c >= lo && c <= hi;
  }
};

GoodBand good_band(double mean_occupancy);

/// Sorted flat indices of the good cells of `grid` for mean occupancy M.
std::vector<std::size_t> classify_good_cells(const CellGrid& grid, double mean_occupancy);

/// Highway oracle for the slow scheme: packets one node of a cell with the
/// given occupancy may hand to another node of the same cell in one slot
/// (1 in a good cell, 0 otherwise). MisuseError under the fast scheme.
int highway_capacity(std::size_t cell_occupancy, double mean_occupancy, Scheme scheme);

/// W / (2C): two fast-scheme packets fit in one mini-slot.
double fast_packet_size(double W, int C);

/// 10 W / (11 c_s C sqrt(M2)).
double slow_packet_size(double W, double c_s, int C, double M2);

/// Debug-mode admissibility checker: feeds each batch of simultaneous
/// transmissions through protocol_check and throws InvariantViolation on the
/// first failure.
class ProtocolAudit {
 public:
  ProtocolAudit(std::span<const Position> positions, double delta, Geometry geometry)
      : positions_(positions), delta_(delta), geometry_(geometry) {}

  void check(std::span<const TransmissionAttempt> batch);

  std::size_t batches() const noexcept { return batches_; }
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::span<const Position> positions_;
  double delta_;
  Geometry geometry_;
  std::size_t batches_ = 0;
  std::size_t attempts_ = 0;
};

}  // namespace manet
