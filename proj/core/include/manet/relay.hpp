#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "manet/coding.hpp"
#include "manet/geometry.hpp"
#include "manet/rng.hpp"

namespace manet {

/// Ring pairing with 0-based ids: node i sends to node (i + 1) mod n.
constexpr NodeId destination_of(NodeId source, std::size_t n) noexcept {
  return static_cast<NodeId>((static_cast<std::size_t>(source) + 1) % n);
}
constexpr NodeId source_of(NodeId destination, std::size_t n) noexcept {
  return static_cast<NodeId>((static_cast<std::size_t>(destination) + n - 1) % n);
}

/// A relay-held copy of coded packet `coded`.
struct DuplicatePacket {
  CodedPacketId coded;
  NodeId carrier = 0;
  NodeId destination = 0;
};

/// Per-generation state shared by both schemes: source queues, relay
/// buffers and destination receive sets.
///
/// Relay buffers are indexed by destination, since every consumer (dedup,
/// deliverability, request/accept) groups copies by where they are going.
/// Between slots at most one copy per (carrier, destination) pair is alive.
class RelayNetwork {
 public:
  struct Copy {
    NodeId carrier = 0;
    std::uint32_t index = 0;
  };

  struct Counters {
    std::size_t created = 0;
    std::size_t dropped_dedup = 0;
    std::size_t delivered = 0;
    std::size_t dropped_end = 0;
  };

  explicit RelayNetwork(std::size_t n);

  std::size_t size() const noexcept { return positions_.size(); }
  std::span<Position> positions() noexcept { return positions_; }
  std::span<const Position> positions() const noexcept { return positions_; }

  /// Drops every copy and receive record and gives each source a fresh
  /// queue of `budget` coded packets for a block of k data packets.
  void start_generation(std::uint64_t generation, int k, int budget);

  std::uint64_t generation() const noexcept { return generation_; }
  int k() const noexcept { return k_; }
  int budget() const noexcept { return budget_; }

  // Sources.
  bool has_untransmitted(NodeId source) const { return next_[source] < static_cast<std::uint32_t>(budget_); }
  int transmitted(NodeId source) const { return static_cast<int>(next_[source]); }
  std::uint32_t take_next(NodeId source);

  // Relays.
  void add_copy(NodeId carrier, NodeId source, std::uint32_t index);
  std::span<const Copy> copies_for(NodeId destination) const { return by_dest_[destination]; }
  std::vector<DuplicatePacket> held_by(NodeId carrier) const;
  std::size_t copies_alive() const noexcept { return alive_; }
  std::size_t copies_of(NodeId source, std::uint32_t index) const;

  /// Coded packets of `source` held by at least `threshold` distinct relays.
  int duplicated(NodeId source, std::size_t threshold) const;

  /// For every carrier holding several copies bound to the same destination,
  /// keeps one uniformly at random. Only destinations touched since the last
  /// call can hold such groups. Returns the number of copies dropped.
  std::size_t dedup(Rng& rng);

  /// Delivers the copies at `positions` (indices into copies_for(destination))
  /// and removes them from their carriers.
  void deliver(NodeId destination, std::span<const std::size_t> positions);

  bool has_received(NodeId destination, std::uint32_t index) const;
  int distinct_received(NodeId destination) const { return distinct_[destination]; }
  std::vector<std::uint32_t> received_indices(NodeId destination) const;

  /// End of super slot: drops all undelivered copies.
  std::size_t drop_all();

  const Counters& counters() const noexcept { return counters_; }

 private:
  std::vector<Position> positions_;
  std::uint64_t generation_ = 0;
  int k_ = 0;
  int budget_ = 0;
  std::vector<std::uint32_t> next_;
  std::vector<std::vector<Copy>> by_dest_;
  std::vector<std::uint8_t> received_;  // n x budget flags
  std::vector<int> distinct_;
  std::size_t alive_ = 0;
  Counters counters_;

  // dedup scratch
  std::vector<NodeId> dirty_;
  std::vector<std::uint8_t> is_dirty_;
  std::vector<std::size_t> fresh_begin_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

/// Per-source outcome of one super slot.
struct SourceOutcome {
  int broadcasts = 0;          ///< coded packets sent out
  int duplicated = 0;          ///< A_i
  int distinct_delivered = 0;  ///< B_i
  bool decoded = false;
  int recovered = 0;
  double delivered_bits = 0.0;
};

struct SuperSlotReport {
  std::uint64_t generation = 0;
  int k = 0;
  int budget = 0;
  double packet_size = 0.0;
  std::vector<SourceOutcome> sources;
  double good_cell_fraction = 0.0;  ///< mean over broadcast slots
  std::size_t broadcasts = 0;
  std::size_t deliveries = 0;
  RelayNetwork::Counters copies;
  std::size_t protocol_batches = 0;
};

/// Independent random streams of a run. Mobility and scheduling draws never
/// depend on the coding mode, so oracle and LT runs with the same seed see
/// the same trajectories and receive sets.
struct RunStreams {
  explicit RunStreams(std::uint64_t seed)
      : mobility(derive_seed(seed, 0)),
        schedule(derive_seed(seed, 1)),
        coding(derive_seed(seed, 2)),
        decode_seed(derive_seed(seed, 3)) {}

  Rng mobility;
  Rng schedule;
  Rng coding;
  std::uint64_t decode_seed;
};

/// Decodes each destination's receive set and credits k * packet_size bits
/// to the source on success. Fills decoded / recovered / delivered_bits /
/// distinct_delivered of `report`.
void decode_and_account(const RelayNetwork& net, const Codec& codec,
                        std::span<const std::vector<CodedPacketId>> coded,
                        double packet_size, SuperSlotReport& report);

}  // namespace manet
