#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "manet/config.hpp"
#include "manet/rng.hpp"

namespace manet {

/// The k data packets a source encodes in one super slot. Payloads are not
/// materialised: packets are tracked by identity and throughput is counted
/// in bits through the packet size.
struct SourceBlock {
  NodeId source_id = 0;
  std::uint64_t generation = 0;
  int k = 1;
};

/// Identity of the `index`-th coded packet of a block. In LT mode the degree
/// and neighbour set are a pure function of `degree_seed` and k.
struct CodedPacketId {
  NodeId source_id = 0;
  std::uint64_t generation = 0;
  std::uint32_t index = 0;
  std::uint64_t degree_seed = 0;

  friend bool operator==(const CodedPacketId&, const CodedPacketId&) = default;
};

/// Robust soliton degree distribution over {1, ..., k}.
class RobustSoliton {
 public:
  static constexpr double kDefaultC = 0.03;
  static constexpr double kDefaultDelta = 0.05;

  explicit RobustSoliton(int k, double c = kDefaultC, double delta = kDefaultDelta);

  int k() const noexcept { return k_; }
  double pmf(int degree) const;
  int sample(Rng& rng) const;

 private:
  int k_;
  std::vector<double> cdf_;  // cdf_[d - 1] = P(degree <= d)
};

/// Source-packet indices XORed into an LT coded packet.
std::vector<std::uint32_t> lt_neighbors(std::uint64_t degree_seed, const RobustSoliton& dist);

/// Incremental belief-propagation (peeling) decoder over packet identities.
/// The recovered set only grows as packets are added, and the final state
/// depends on the set of packets, not their order.
class PeelingDecoder {
 public:
  explicit PeelingDecoder(int k);

  /// Adds one coded packet given its neighbour set; returns recovered count.
  int add(std::span<const std::uint32_t> neighbors);

  int recovered() const noexcept { return recovered_count_; }
  bool complete() const noexcept { return recovered_count_ == k_; }
  int k() const noexcept { return k_; }

 private:
  void resolve(std::uint32_t symbol);

  int k_;
  int recovered_count_ = 0;
  std::vector<bool> known_;
  std::vector<std::vector<std::uint32_t>> packets_;    // pending neighbours per packet
  std::vector<int> unresolved_;                        // unknown neighbours per packet
  std::vector<std::vector<std::uint32_t>> incidence_;  // symbol -> packets
  std::vector<std::uint32_t> ripple_;
};

struct DecodeResult {
  bool success = false;
  int recovered = 0;
};

/// Rateless codec shared by both schemes. Immutable after construction.
///
/// oracle: decoding succeeds iff at least ceil((1 + eps) k) distinct coded
///   packets arrived, except that a success is turned into a failure with
///   probability min(1, k^-a). The draw is a deterministic function of
///   (seed, source, generation), so decode stays a pure function of its input.
/// lt: LT code with robust soliton degrees, decoded by peeling.
class Codec {
 public:
  Codec(CodingMode mode, double epsilon, double oracle_exponent = 1.0,
        std::uint64_t seed = 0);

  CodingMode mode() const noexcept { return mode_; }
  double epsilon() const noexcept { return epsilon_; }

  /// Exactly `budget` coded packet ids; InfeasibleRate when budget < k.
  std::vector<CodedPacketId> encode(const SourceBlock& block, int budget, Rng& rng) const;

  /// IntegrityError when a packet belongs to another block.
  DecodeResult decode(const SourceBlock& block, std::span<const CodedPacketId> received) const;

  /// ceil((1 + eps) k), robust to rounding of (1 + eps) k.
  int oracle_threshold(int k) const;

  /// min(1, k^-a).
  double oracle_failure_probability(int k) const;

 private:
  CodingMode mode_;
  double epsilon_;
  double oracle_exponent_;
  std::uint64_t seed_;
};

/// Decoding overhead of the LT code: for each trial, fresh coded packets are
/// fed to a peeling decoder until it completes, and received / k is recorded.
std::vector<double> overhead_profile(int k, int trials, Rng& rng);

}  // namespace manet
