#pragma once

#include <cstddef>
#include <vector>

#include "manet/coding.hpp"
#include "manet/config.hpp"
#include "manet/grid.hpp"
#include "manet/phy.hpp"
#include "manet/relay.hpp"

namespace manet::slow {

/// Derived quantities of the slow-mobility scheme (16D-slot super slot).
struct Parameters {
  double M1 = 0.0;                        ///< (n / D)^(1/3), broadcast-cell mean
  double M2 = 0.0;                        ///< (n / D)^(2/3), receive-cell mean
  int k = 0;                              ///< floor(2D / 5)
  int budget = 0;                         ///< D
  int recipients = 0;                     ///< floor(9 M1 / 10)
  std::size_t duplication_threshold = 0;  ///< ceil(4 M1 / 5)
  double packet_size = 0.0;               ///< 10W / (11 c_s C sqrt(M2))
  int broadcast_side = 0;                 ///< ~ (n^2 D)^(1/6)
  int receive_side = 0;                   ///< ~ (n D^2)^(1/6)
  double radius = 0.0;                    ///< sqrt(2) * broadcast cell side
  std::int64_t broadcast_slots = 0;       ///< D
  std::int64_t receive_slots = 0;         ///< 15D
};

/// RegimeError when k < 1; InvariantViolation if M1 M2 D / n != 1.
Parameters derive_parameters(const SimConfig& cfg);

struct BroadcastStats {
  std::size_t good_cells = 0;
  std::size_t broadcasts = 0;
  std::size_t copies = 0;
};

/// One broadcast slot on the M1 grid. In every good cell the occupants take
/// turns in a random order; each one with untransmitted packets sends its
/// next coded packet to min(recipients, occupancy - 1) other occupants.
/// Exhausted nodes do not consume a turn.
BroadcastStats broadcast_step(RelayNetwork& net, const CellGrid& grid, const Parameters& params,
                              Rng& rng, ProtocolAudit* audit = nullptr);

struct ReceiveStats {
  std::size_t requests = 0;
  std::size_t deliveries = 0;
};

/// One receive slot on the M2 grid, good cells only: each carrier with
/// deliverable copies requests one of them at random, each destination
/// accepts one request at random, and accepted copies are handed over
/// through the highway oracle within the slot.
ReceiveStats receive_step(RelayNetwork& net, const CellGrid& grid, const Parameters& params,
                          Rng& rng);

class SlowScheme {
 public:
  explicit SlowScheme(const SimConfig& cfg);

  const Parameters& parameters() const noexcept { return params_; }
  const RelayNetwork& network() const noexcept { return net_; }

  SuperSlotReport run_super_slot(std::uint64_t generation, RunStreams& streams);

 private:
  SimConfig cfg_;
  Parameters params_;
  RelayNetwork net_;
  CellGrid broadcast_grid_;
  CellGrid receive_grid_;
  std::vector<std::vector<CodedPacketId>> coded_;
};

}  // namespace manet::slow

namespace manet {

/// Encode, D broadcast slots, 15D receive slots, decode, on a fresh network.
SuperSlotReport run_super_slot_slow(const SimConfig& cfg, Rng& rng);

inline slow::ReceiveStats receive_step_slow(RelayNetwork& net, const CellGrid& grid,
                                            const slow::Parameters& params, Rng& rng) {
  return slow::receive_step(net, grid, params, rng);
}

}  // namespace manet
