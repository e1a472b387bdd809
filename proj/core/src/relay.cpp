#include "manet/relay.hpp"

#include <algorithm>

#include "manet/errors.hpp"

namespace manet {

RelayNetwork::RelayNetwork(std::size_t n)
    : positions_(n),
      next_(n, 0),
      by_dest_(n),
      distinct_(n, 0),
      is_dirty_(n, 0),
      fresh_begin_(n, 0),
      stamp_(n, 0) {}

void RelayNetwork::start_generation(std::uint64_t generation, int k, int budget) {
  generation_ = generation;
  k_ = k;
  budget_ = budget;
  std::fill(next_.begin(), next_.end(), 0);
  for (auto& list : by_dest_) list.clear();
  received_.assign(size() * static_cast<std::size_t>(budget), 0);
  std::fill(distinct_.begin(), distinct_.end(), 0);
  alive_ = 0;
  counters_ = {};
  for (NodeId d : dirty_) is_dirty_[d] = 0;
  dirty_.clear();
}

std::uint32_t RelayNetwork::take_next(NodeId source) {
  if (!has_untransmitted(source)) throw MisuseError("source has no untransmitted coded packets");
  return next_[source]++;
}

void RelayNetwork::add_copy(NodeId carrier, NodeId source, std::uint32_t index) {
  const NodeId dest = destination_of(source, size());
  auto& list = by_dest_[dest];
  if (!is_dirty_[dest]) {
    is_dirty_[dest] = 1;
    dirty_.push_back(dest);
    fresh_begin_[dest] = list.size();
  }
  list.push_back({carrier, index});
  ++alive_;
  ++counters_.created;
}

std::vector<DuplicatePacket> RelayNetwork::held_by(NodeId carrier) const {
  std::vector<DuplicatePacket> out;
  for (std::size_t d = 0; d < by_dest_.size(); ++d) {
    const auto dest = static_cast<NodeId>(d);
    const NodeId source = source_of(dest, size());
    for (const auto& c : by_dest_[d]) {
      if (c.carrier != carrier) continue;
      DuplicatePacket dup;
      dup.coded.source_id = source;
      dup.coded.generation = generation_;
      dup.coded.index = c.index;
      dup.carrier = carrier;
      dup.destination = dest;
      out.push_back(dup);
    }
  }
  return out;
}

std::size_t RelayNetwork::copies_of(NodeId source, std::uint32_t index) const {
  const auto& list = by_dest_[destination_of(source, size())];
  return static_cast<std::size_t>(
      std::count_if(list.begin(), list.end(), [&](const Copy& c) { return c.index == index; }));
}

int RelayNetwork::duplicated(NodeId source, std::size_t threshold) const {
  std::vector<std::size_t> per_index(static_cast<std::size_t>(budget_), 0);
  for (const auto& c : by_dest_[destination_of(source, size())]) ++per_index[c.index];
  return static_cast<int>(std::count_if(per_index.begin(), per_index.end(),
                                        [&](std::size_t v) { return v >= threshold; }));
}

std::size_t RelayNetwork::dedup(Rng& rng) {
  std::size_t dropped = 0;
  // Dirty lists are processed in first-touch order, which is itself a
  // deterministic function of the slot's draws.
  std::vector<std::pair<NodeId, std::size_t>> group;
  std::vector<bool> remove;
  for (NodeId dest : dirty_) {
    is_dirty_[dest] = 0;
    auto& list = by_dest_[dest];
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    for (std::size_t i = fresh_begin_[dest]; i < list.size(); ++i) stamp_[list[i].carrier] = epoch_;
    group.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (stamp_[list[i].carrier] == epoch_) group.emplace_back(list[i].carrier, i);
    }
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end());
    remove.assign(list.size(), false);
    bool any = false;
    for (std::size_t b = 0; b < group.size();) {
      std::size_t e = b + 1;
      while (e < group.size() && group[e].first == group[b].first) ++e;
      if (e - b > 1) {
        const std::size_t keep = b + static_cast<std::size_t>(rng.below(e - b));
        for (std::size_t g = b; g < e; ++g) {
          if (g != keep) {
            remove[group[g].second] = true;
            any = true;
          }
        }
      }
      b = e;
    }
    if (!any) continue;
    std::size_t w = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!remove[i]) list[w++] = list[i];
    }
    const std::size_t removed = list.size() - w;
    list.resize(w);
    dropped += removed;
  }
  dirty_.clear();
  alive_ -= dropped;
  counters_.dropped_dedup += dropped;
  return dropped;
}

void RelayNetwork::deliver(NodeId destination, std::span<const std::size_t> positions) {
  auto& list = by_dest_[destination];
  std::vector<std::size_t> order(positions.begin(), positions.end());
  std::sort(order.begin(), order.end(), std::greater<>());
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw MisuseError("deliver: duplicate copy position");
  }
  for (std::size_t pos : order) {
    if (pos >= list.size()) throw MisuseError("deliver: copy position out of range");
    const std::uint32_t index = list[pos].index;
    auto& flag = received_[static_cast<std::size_t>(destination) * budget_ + index];
    if (flag == 0) {
      flag = 1;
      ++distinct_[destination];
    }
    list.erase(list.begin() + static_cast<std::ptrdiff_t>(pos));
    --alive_;
    ++counters_.delivered;
  }
}

bool RelayNetwork::has_received(NodeId destination, std::uint32_t index) const {
  return received_[static_cast<std::size_t>(destination) * budget_ + index] != 0;
}

std::vector<std::uint32_t> RelayNetwork::received_indices(NodeId destination) const {
  std::vector<std::uint32_t> out;
  for (int i = 0; i < budget_; ++i) {
    if (has_received(destination, static_cast<std::uint32_t>(i))) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

std::size_t RelayNetwork::drop_all() {
  const std::size_t dropped = alive_;
  for (auto& list : by_dest_) list.clear();
  alive_ = 0;
  counters_.dropped_end += dropped;
  for (NodeId d : dirty_) is_dirty_[d] = 0;
  dirty_.clear();
  return dropped;
}

void decode_and_account(const RelayNetwork& net, const Codec& codec,
                        std::span<const std::vector<CodedPacketId>> coded, double packet_size,
                        SuperSlotReport& report) {
  const std::size_t n = net.size();
  report.sources.resize(n);
  std::vector<CodedPacketId> received;
  for (std::size_t i = 0; i < n; ++i) {
    const auto source = static_cast<NodeId>(i);
    const NodeId dest = destination_of(source, n);
    auto& out = report.sources[i];
    out.distinct_delivered = net.distinct_received(dest);
    received.clear();
    for (std::uint32_t index : net.received_indices(dest)) received.push_back(coded[i][index]);
    const SourceBlock block{source, net.generation(), net.k()};
    const DecodeResult result = codec.decode(block, received);
    out.decoded = result.success;
    out.recovered = result.recovered;
    out.delivered_bits = result.success ? static_cast<double>(net.k()) * packet_size : 0.0;
  }
}

}  // namespace manet
