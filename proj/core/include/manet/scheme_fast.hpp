#pragma once

#include <cstddef>
#include <vector>

#include "manet/coding.hpp"
#include "manet/config.hpp"
#include "manet/grid.hpp"
#include "manet/phy.hpp"
#include "manet/relay.hpp"

namespace manet::fast {

/// Derived quantities of the fast-mobility scheme (6D-slot super slot).
struct Parameters {
  double M = 0.0;                       ///< sqrt(n / D), mean nodes per cell
  int k = 0;                            ///< floor(6D / (25M)) data packets per block
  int budget = 0;                       ///< floor(D / M) coded packets per block
  int recipients = 0;                   ///< floor(9M / 10) copies per broadcast
  std::size_t duplication_threshold = 0;  ///< ceil(4M / 5) relays
  double packet_size = 0.0;             ///< W / (2C) bits
  int side_count = 0;                   ///< grid side, ~ (nD)^(1/4)
  double radius = 0.0;                  ///< sqrt(2) * cell side
  std::int64_t broadcast_slots = 0;     ///< D
  std::int64_t receive_slots = 0;       ///< 5D
};

/// RegimeError when k < 1 or budget < k.
Parameters derive_parameters(const SimConfig& cfg);

struct BroadcastStats {
  std::size_t good_cells = 0;
  std::size_t broadcasts = 0;
  std::size_t copies = 0;
};

/// One broadcast slot. In every good cell one occupant is picked uniformly;
/// if it still has untransmitted coded packets it sends the next one to
/// min(recipients, occupancy - 1) distinct other occupants.
BroadcastStats broadcast_step(RelayNetwork& net, const CellGrid& grid, const Parameters& params,
                              Rng& rng, ProtocolAudit* audit = nullptr);

/// One receive slot: every cell holding at most two deliverable copies
/// (carrier and destination share the cell) delivers all of them; cells with
/// three or more deliver nothing. Returns the number of copies delivered.
std::size_t receive_step(RelayNetwork& net, const CellGrid& grid, const Parameters& params,
                         ProtocolAudit* audit = nullptr);

/// Scheme driver reusing its buffers across super slots.
class FastScheme {
 public:
  explicit FastScheme(const SimConfig& cfg);

  const Parameters& parameters() const noexcept { return params_; }
  const RelayNetwork& network() const noexcept { return net_; }

  SuperSlotReport run_super_slot(std::uint64_t generation, RunStreams& streams);

 private:
  SimConfig cfg_;
  Parameters params_;
  RelayNetwork net_;
  CellGrid grid_;
  std::vector<std::vector<CodedPacketId>> coded_;
};

}  // namespace manet::fast

namespace manet {

/// Encode, D broadcast slots, 5D receive slots, decode, on a fresh network.
SuperSlotReport run_super_slot_fast(const SimConfig& cfg, Rng& rng);

/// Fast-scheme receive step under its operation name.
inline std::size_t receive_step_fast(RelayNetwork& net, const CellGrid& grid,
                                     const fast::Parameters& params,
                                     ProtocolAudit* audit = nullptr) {
  return fast::receive_step(net, grid, params, audit);
}

/// Keep one random copy per (carrier, destination).
inline std::size_t dedup_step(RelayNetwork& net, Rng& rng) { return net.dedup(rng); }

}  // namespace manet
