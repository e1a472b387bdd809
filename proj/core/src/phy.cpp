#include "manet/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "manet/errors.hpp"

namespace manet {

std::vector<bool> protocol_check(std::span<const TransmissionAttempt> attempts,
                                 std::span<const Position> positions, double delta,
                                 Geometry geometry) {
  std::vector<NodeId> transmitters;
  transmitters.reserve(attempts.size());
  for (const auto& a : attempts) {
    if (a.mini_slot != attempts.front().mini_slot) {
      throw MisuseError("protocol_check: attempts span several mini-slots");
    }
    if (a.tx == a.rx) throw MisuseError("protocol_check: transmitter equals receiver");
    if (!(a.radius > 0.0)) throw MisuseError("protocol_check: radius must be positive");
    if (a.tx >= positions.size() || a.rx >= positions.size()) {
      throw MisuseError("protocol_check: node id out of range");
    }
    transmitters.push_back(a.tx);
  }
  std::sort(transmitters.begin(), transmitters.end());
  transmitters.erase(std::unique(transmitters.begin(), transmitters.end()), transmitters.end());

  std::vector<bool> ok(attempts.size(), false);
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    const auto& a = attempts[i];
    const Position rx = positions[a.rx];
    const double link = distance(positions[a.tx], rx, geometry);
    if (link > a.radius) continue;
    const double guard = (1.0 + delta) * link;
    bool clear = true;
    for (NodeId k : transmitters) {
      if (k == a.tx) continue;
      if (distance(positions[k], rx, geometry) < guard) {
        clear = false;
        break;
      }
    }
    ok[i] = clear;
  }
  return ok;
}

CellSchedule color_cells(int side_count, int mini_slots) {
  if (mini_slots != 9) {
    throw UnsupportedConfig(
        fmt::format("the 3x3 reuse coloring needs C = 9 mini-slots, got C = {}", mini_slots));
  }
  if (side_count < 1) throw ConfigError("grid side count must be >= 1");
  return CellSchedule(side_count, mini_slots);
}

GoodBand good_band(double mean_occupancy) {
  // A small tolerance keeps exact products such as 9 * 10 / 10 integral.
  constexpr double kEps = 1e-9;
  const double lo = std::ceil(0.9 * mean_occupancy - kEps) + 1.0;
  const double hi = std::floor(1.1 * mean_occupancy + kEps);
  return {static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)};
}

std::vector<std::size_t> classify_good_cells(const CellGrid& grid, double mean_occupancy) {
  if (!(mean_occupancy > 0.0)) throw MisuseError("classify_good_cells: M must be positive");
  const GoodBand band = good_band(mean_occupancy);
  std::vector<std::size_t> good;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (band.contains(grid.occupancy(c))) good.push_back(c);
  }
  return good;
}

int highway_capacity(std::size_t cell_occupancy, double mean_occupancy, Scheme scheme) {
  if (scheme != Scheme::slow) {
    throw MisuseError("highway_capacity is only defined for the slow-mobility scheme");
  }
  return good_band(mean_occupancy).contains(cell_occupancy) ? 1 : 0;
}

double fast_packet_size(double W, int C) { return W / (2.0 * C); }

double slow_packet_size(double W, double c_s, int C, double M2) {
  return 10.0 * W / (11.0 * c_s * C * std::sqrt(M2));
}

void ProtocolAudit::check(std::span<const TransmissionAttempt> batch) {
  if (batch.empty()) return;
  ++batches_;
  attempts_ += batch.size();
  const auto ok = protocol_check(batch, positions_, delta_, geometry_);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!ok[i]) {
      const auto& a = batch[i];
      throw InvariantViolation(fmt::format(
          "inadmissible transmission {} -> {} in mini-slot {} (link {:.6g}, radius {:.6g})", a.tx,
          a.rx, a.mini_slot, distance(positions_[a.tx], positions_[a.rx], geometry_), a.radius));
    }
  }
}

}  // namespace manet
