#include "manet/scheme_fast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "manet/errors.hpp"

namespace manet::fast {

namespace {

constexpr double kEps = 1e-9;

// Picks `count` distinct entries of `pool` (which it reorders) uniformly.
std::span<const NodeId> sample_without_replacement(std::vector<NodeId>& pool, std::size_t count,
                                                   Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  return std::span<const NodeId>(pool).first(count);
}

}  // namespace

Parameters derive_parameters(const SimConfig& cfg) {
  validate(cfg);
  if (cfg.scheme != Scheme::fast) throw ConfigError("configuration does not select the fast scheme");
  color_cells(1, cfg.C);  // rejects C != 9

  const auto n = static_cast<double>(cfg.n);
  const auto D = static_cast<double>(cfg.D);
  Parameters p;
  p.M = std::sqrt(n / D);
  p.k = static_cast<int>(std::floor(6.0 * D / (25.0 * p.M) + kEps));
  p.budget = static_cast<int>(std::floor(D / p.M + kEps));
  if (p.k < 1) {
    throw RegimeError(fmt::format(
        "fast scheme: floor(6D/(25M)) = 0 data packets per block for n={}, D={} (M={:.4g}); D is too "
        "small relative to n",
        cfg.n, cfg.D, p.M));
  }
  if (p.budget < p.k) {
    throw RegimeError(fmt::format("fast scheme: coded budget {} below block size {}", p.budget, p.k));
  }
  p.recipients = static_cast<int>(std::floor(0.9 * p.M + kEps));
  p.duplication_threshold = static_cast<std::size_t>(std::ceil(0.8 * p.M - kEps));
  p.packet_size = fast_packet_size(cfg.W, cfg.C);
  p.side_count = round_side_count(std::pow(n * D, 0.25), cfg.geometry == Geometry::torus);
  p.radius = std::numbers::sqrt2 / p.side_count;
  p.broadcast_slots = cfg.D;
  p.receive_slots = 5 * cfg.D;
  return p;
}

BroadcastStats broadcast_step(RelayNetwork& net, const CellGrid& grid, const Parameters& params,
                              Rng& rng, ProtocolAudit* audit) {
  BroadcastStats stats;
  const auto good = classify_good_cells(grid, grid.mean_occupancy());
  stats.good_cells = good.size();
  const CellSchedule schedule(grid.side_count(), 9);
  std::array<std::vector<TransmissionAttempt>, 9> batches;
  std::vector<NodeId> others;

  for (std::size_t cell : good) {
    const auto occupants = grid.occupants(cell);
    const NodeId sender = occupants[rng.below(occupants.size())];
    if (!net.has_untransmitted(sender)) continue;
    const std::uint32_t index = net.take_next(sender);
    ++stats.broadcasts;

    others.clear();
    for (NodeId v : occupants) {
      if (v != sender) others.push_back(v);
    }
    const std::size_t count = std::min(static_cast<std::size_t>(params.recipients), others.size());
    const int color = schedule.color(cell);
    for (NodeId r : sample_without_replacement(others, count, rng)) {
      net.add_copy(r, sender, index);
      ++stats.copies;
      if (audit) batches[static_cast<std::size_t>(color)].push_back({sender, r, params.radius, color});
    }
  }
  if (audit) {
    for (const auto& batch : batches) audit->check(batch);
  }
  return stats;
}

std::size_t receive_step(RelayNetwork& net, const CellGrid& grid, const Parameters& params,
                         ProtocolAudit* audit) {
  struct Deliverable {
    std::size_t cell;
    NodeId destination;
    std::size_t position;
  };
  std::vector<Deliverable> deliverable;
  std::vector<std::uint32_t> per_cell(grid.cell_count(), 0);

  const std::size_t n = net.size();
  for (std::size_t d = 0; d < n; ++d) {
    const auto dest = static_cast<NodeId>(d);
    const std::size_t cell = grid.cell_of(dest);
    const auto copies = net.copies_for(dest);
    for (std::size_t pos = 0; pos < copies.size(); ++pos) {
      if (grid.cell_of(copies[pos].carrier) == cell) {
        deliverable.push_back({cell, dest, pos});
        ++per_cell[cell];
      }
    }
  }

  const CellSchedule schedule(grid.side_count(), 9);
  // Two packets fit in a mini-slot: first and second half are separate
  // simultaneous batches.
  std::array<std::array<std::vector<TransmissionAttempt>, 2>, 9> batches;
  std::vector<std::uint32_t> sent_in_cell(audit ? grid.cell_count() : 0, 0);

  std::size_t delivered = 0;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < deliverable.size();) {
    const NodeId dest = deliverable[i].destination;
    positions.clear();
    for (; i < deliverable.size() && deliverable[i].destination == dest; ++i) {
      const auto& e = deliverable[i];
      if (per_cell[e.cell] > 2) continue;
      positions.push_back(e.position);
      if (audit) {
        const NodeId carrier = net.copies_for(dest)[e.position].carrier;
        const auto half = sent_in_cell[e.cell]++;
        if (carrier != dest) {
          const int color = schedule.color(e.cell);
          batches[static_cast<std::size_t>(color)][half].push_back(
              {carrier, dest, params.radius, color});
        }
      }
    }
    if (!positions.empty()) {
      net.deliver(dest, positions);
      delivered += positions.size();
    }
  }
  if (audit) {
    for (const auto& color : batches) {
      for (const auto& batch : color) audit->check(batch);
    }
  }
  return delivered;
}

FastScheme::FastScheme(const SimConfig& cfg)
    : cfg_(cfg),
      params_(derive_parameters(cfg)),
      net_(static_cast<std::size_t>(cfg.n)),
      grid_(params_.side_count),
      coded_(static_cast<std::size_t>(cfg.n)) {}

SuperSlotReport FastScheme::run_super_slot(std::uint64_t generation, RunStreams& streams) {
  const std::size_t n = net_.size();
  SuperSlotReport report;
  report.generation = generation;
  report.k = params_.k;
  report.budget = params_.budget;
  report.packet_size = params_.packet_size;
  report.sources.resize(n);

  // Encoding.
  const Codec codec(cfg_.coding_mode, cfg_.epsilon_code, cfg_.oracle_exponent, streams.decode_seed);
  net_.start_generation(generation, params_.k, params_.budget);
  for (std::size_t i = 0; i < n; ++i) {
    coded_[i] = codec.encode({static_cast<NodeId>(i), generation, params_.k}, params_.budget,
                             streams.coding);
  }

  ProtocolAudit audit(net_.positions(), cfg_.delta, cfg_.geometry);
  ProtocolAudit* audit_ptr = cfg_.check_protocol ? &audit : nullptr;

  // Broadcasting: D slots.
  double good_sum = 0.0;
  for (std::int64_t t = 0; t < params_.broadcast_slots; ++t) {
    reshuffle(net_.positions(), streams.mobility);
    grid_.rebuild(net_.positions());
    const auto stats = broadcast_step(net_, grid_, params_, streams.schedule, audit_ptr);
    net_.dedup(streams.schedule);
    good_sum += static_cast<double>(stats.good_cells) / static_cast<double>(grid_.cell_count());
    report.broadcasts += stats.broadcasts;
  }
  report.good_cell_fraction = good_sum / static_cast<double>(params_.broadcast_slots);
  for (std::size_t i = 0; i < n; ++i) {
    const auto source = static_cast<NodeId>(i);
    report.sources[i].broadcasts = net_.transmitted(source);
    report.sources[i].duplicated = net_.duplicated(source, params_.duplication_threshold);
  }

  // Receiving: 5D slots.
  for (std::int64_t t = 0; t < params_.receive_slots; ++t) {
    reshuffle(net_.positions(), streams.mobility);
    grid_.rebuild(net_.positions());
    report.deliveries += receive_step(net_, grid_, params_, audit_ptr);
  }

  decode_and_account(net_, codec, coded_, params_.packet_size, report);
  net_.drop_all();
  report.copies = net_.counters();
  report.protocol_batches = audit.batches();

  const auto& c = report.copies;
  if (c.created != c.dropped_dedup + c.delivered + c.dropped_end) {
    throw InvariantViolation("fast scheme: duplicate packets were not conserved");
  }
  return report;
}

}  // namespace manet::fast

namespace manet {

SuperSlotReport run_super_slot_fast(const SimConfig& cfg, Rng& rng) {
  fast::FastScheme scheme(cfg);
  RunStreams streams(rng.next());
  return scheme.run_super_slot(0, streams);
}

}  // namespace manet
