#include "manet/scheme_slow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "manet/errors.hpp"

namespace manet::slow {

namespace {

constexpr double kEps = 1e-9;

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
  if (cfg.scheme != Scheme::slow) throw ConfigError("configuration does not select the slow scheme");
  color_cells(1, cfg.C);

  const auto n = static_cast<double>(cfg.n);
  const auto D = static_cast<double>(cfg.D);
  Parameters p;
  p.M1 = std::cbrt(n / D);
  p.M2 = p.M1 * p.M1;
  if (std::abs(p.M1 * p.M2 * D / n - 1.0) > 1e-9) {
    throw InvariantViolation("slow scheme: M1 M2 D / n differs from 1");
  }
  p.k = static_cast<int>(std::floor(0.4 * D + kEps));
  if (p.k < 1) {
    throw RegimeError(fmt::format(
        "slow scheme: floor(2D/5) = 0 data packets per block for D={}; D >= 3 is required", cfg.D));
  }
  p.budget = static_cast<int>(cfg.D);
  p.recipients = static_cast<int>(std::floor(0.9 * p.M1 + kEps));
  p.duplication_threshold = static_cast<std::size_t>(std::ceil(0.8 * p.M1 - kEps));
  p.packet_size = slow_packet_size(cfg.W, cfg.c_s, cfg.C, p.M2);
  p.broadcast_side =
      round_side_count(std::pow(n * n * D, 1.0 / 6.0), cfg.geometry == Geometry::torus);
  p.receive_side = round_side_count(std::pow(n * D * D, 1.0 / 6.0), false);
  p.radius = std::numbers::sqrt2 / p.broadcast_side;
  p.broadcast_slots = cfg.D;
  p.receive_slots = 15 * cfg.D;
  return p;
}

BroadcastStats broadcast_step(RelayNetwork& net, const CellGrid& grid, const Parameters& params,
                              Rng& rng, ProtocolAudit* audit) {
  BroadcastStats stats;
  const auto good = classify_good_cells(grid, grid.mean_occupancy());
  stats.good_cells = good.size();
  const CellSchedule schedule(grid.side_count(), 9);
  // (color, turn, attempt); cells of one color transmit their t-th turn together.
  std::vector<std::tuple<int, int, TransmissionAttempt>> attempts;
  std::vector<NodeId> order;
  std::vector<NodeId> others;

  for (std::size_t cell : good) {
    const auto occupants = grid.occupants(cell);
    order.assign(occupants.begin(), occupants.end());
    rng.shuffle(order.begin(), order.end());
    const int color = schedule.color(cell);
    int turn = 0;
    for (NodeId sender : order) {
      if (!net.has_untransmitted(sender)) continue;
      const std::uint32_t index = net.take_next(sender);
      ++stats.broadcasts;
      others.clear();
      for (NodeId v : occupants) {
        if (v != sender) others.push_back(v);
      }
      const std::size_t count =
          std::min(static_cast<std::size_t>(params.recipients), others.size());
      for (NodeId r : sample_without_replacement(others, count, rng)) {
        net.add_copy(r, sender, index);
        ++stats.copies;
        if (audit) attempts.emplace_back(color, turn, TransmissionAttempt{sender, r, params.radius, color});
      }
      ++turn;
    }
  }

  if (audit && !attempts.empty()) {
    std::stable_sort(attempts.begin(), attempts.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::vector<TransmissionAttempt> batch;
    for (std::size_t i = 0; i < attempts.size();) {
      const auto key = std::tie(std::get<0>(attempts[i]), std::get<1>(attempts[i]));
      batch.clear();
      for (; i < attempts.size() &&
             std::tie(std::get<0>(attempts[i]), std::get<1>(attempts[i])) == key;
           ++i) {
        batch.push_back(std::get<2>(attempts[i]));
      }
      audit->check(batch);
    }
  }
  return stats;
}

ReceiveStats receive_step(RelayNetwork& net, const CellGrid& grid, const Parameters& /*params*/,
                          Rng& rng) {
  struct Entry {
    NodeId carrier;
    NodeId destination;
    std::size_t position;
  };
  const double mean = grid.mean_occupancy();
  const GoodBand band = good_band(mean);

  std::vector<std::uint8_t> good(grid.cell_count());
  for (std::size_t c = 0; c < good.size(); ++c) good[c] = band.contains(grid.occupancy(c)) ? 1 : 0;

  std::vector<Entry> deliverable;
  const std::size_t n = net.size();
  for (std::size_t d = 0; d < n; ++d) {
    const auto dest = static_cast<NodeId>(d);
    const std::size_t cell = grid.cell_of(dest);
    if (!good[cell]) continue;
    const auto copies = net.copies_for(dest);
    for (std::size_t pos = 0; pos < copies.size(); ++pos) {
      if (grid.cell_of(copies[pos].carrier) == cell) {
        deliverable.push_back({copies[pos].carrier, dest, pos});
      }
    }
  }

  ReceiveStats stats;
  if (deliverable.empty()) return stats;

  // Request: each carrier picks one of its deliverable copies.
  std::stable_sort(deliverable.begin(), deliverable.end(),
                   [](const Entry& a, const Entry& b) { return a.carrier < b.carrier; });
  std::vector<Entry> requests;
  for (std::size_t i = 0; i < deliverable.size();) {
    std::size_t j = i;
    while (j < deliverable.size() && deliverable[j].carrier == deliverable[i].carrier) ++j;
    requests.push_back(deliverable[i + rng.below(j - i)]);
    i = j;
  }
  stats.requests = requests.size();

  // Accept: each destination takes one request.
  std::stable_sort(requests.begin(), requests.end(),
                   [](const Entry& a, const Entry& b) { return a.destination < b.destination; });
  for (std::size_t i = 0; i < requests.size();) {
    std::size_t j = i;
    while (j < requests.size() && requests[j].destination == requests[i].destination) ++j;
    const Entry& chosen = requests[i + rng.below(j - i)];
    const std::size_t cell = grid.cell_of(chosen.destination);
    if (highway_capacity(grid.occupancy(cell), mean, Scheme::slow) < 1) {
      throw InvariantViolation("slow scheme: delivery scheduled outside a good cell");
    }
    const std::size_t pos = chosen.position;
    net.deliver(chosen.destination, std::span<const std::size_t>(&pos, 1));
    ++stats.deliveries;
    i = j;
  }
  return stats;
}

SlowScheme::SlowScheme(const SimConfig& cfg)
    : cfg_(cfg),
      params_(derive_parameters(cfg)),
      net_(static_cast<std::size_t>(cfg.n)),
      broadcast_grid_(params_.broadcast_side),
      receive_grid_(params_.receive_side),
      coded_(static_cast<std::size_t>(cfg.n)) {}

SuperSlotReport SlowScheme::run_super_slot(std::uint64_t generation, RunStreams& streams) {
  const std::size_t n = net_.size();
  SuperSlotReport report;
  report.generation = generation;
  report.k = params_.k;
  report.budget = params_.budget;
  report.packet_size = params_.packet_size;
  report.sources.resize(n);

  const Codec codec(cfg_.coding_mode, cfg_.epsilon_code, cfg_.oracle_exponent, streams.decode_seed);
  net_.start_generation(generation, params_.k, params_.budget);
  for (std::size_t i = 0; i < n; ++i) {
    coded_[i] = codec.encode({static_cast<NodeId>(i), generation, params_.k}, params_.budget,
                             streams.coding);
  }

  ProtocolAudit audit(net_.positions(), cfg_.delta, cfg_.geometry);
  ProtocolAudit* audit_ptr = cfg_.check_protocol ? &audit : nullptr;

  double good_sum = 0.0;
  for (std::int64_t t = 0; t < params_.broadcast_slots; ++t) {
    reshuffle(net_.positions(), streams.mobility);
    broadcast_grid_.rebuild(net_.positions());
    const auto stats = broadcast_step(net_, broadcast_grid_, params_, streams.schedule, audit_ptr);
    net_.dedup(streams.schedule);
    good_sum +=
        static_cast<double>(stats.good_cells) / static_cast<double>(broadcast_grid_.cell_count());
    report.broadcasts += stats.broadcasts;
  }
  report.good_cell_fraction = good_sum / static_cast<double>(params_.broadcast_slots);
  for (std::size_t i = 0; i < n; ++i) {
    const auto source = static_cast<NodeId>(i);
    report.sources[i].broadcasts = net_.transmitted(source);
    report.sources[i].duplicated = net_.duplicated(source, params_.duplication_threshold);
  }

  for (std::int64_t t = 0; t < params_.receive_slots; ++t) {
    reshuffle(net_.positions(), streams.mobility);
    receive_grid_.rebuild(net_.positions());
    report.deliveries += receive_step(net_, receive_grid_, params_, streams.schedule).deliveries;
  }

  decode_and_account(net_, codec, coded_, params_.packet_size, report);
  net_.drop_all();
  report.copies = net_.counters();
  report.protocol_batches = audit.batches();

  const auto& c = report.copies;
  if (c.created != c.dropped_dedup + c.delivered + c.dropped_end) {
    throw InvariantViolation("slow scheme: duplicate packets were not conserved");
  }
  return report;
}

}  // namespace manet::slow

namespace manet {

SuperSlotReport run_super_slot_slow(const SimConfig& cfg, Rng& rng) {
  slow::SlowScheme scheme(cfg);
  RunStreams streams(rng.next());
  return scheme.run_super_slot(0, streams);
}

}  // namespace manet
