#include "manet/coding.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "manet/errors.hpp"

namespace manet {

RobustSoliton::RobustSoliton(int k, double c, double delta) : k_(k) {
  if (k < 1) throw ParameterError("robust soliton needs k >= 1");
  std::vector<double> weight(static_cast<std::size_t>(k), 0.0);
  const double kd = k;
  // Ideal soliton.
  weight[0] = 1.0 / kd;
  for (int d = 2; d <= k; ++d) weight[d - 1] = 1.0 / (static_cast<double>(d) * (d - 1));
  // Robust correction: R/(dk) below the spike at k/R, R ln(R/delta)/k on it.
  const double R = c * std::log(kd / delta) * std::sqrt(kd);
  if (R > 0.0) {
    const int spike = std::clamp(static_cast<int>(std::floor(kd / R)), 1, k);
    for (int d = 1; d < spike; ++d) weight[d - 1] += R / (d * kd);
    weight[spike - 1] += std::max(0.0, R * std::log(R / delta) / kd);
  }
  double total = 0.0;
  for (double w : weight) total += w;
  cdf_.resize(weight.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    acc += weight[i] / total;
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

double RobustSoliton::pmf(int degree) const {
  if (degree < 1 || degree > k_) return 0.0;
  const auto i = static_cast<std::size_t>(degree - 1);
  return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

int RobustSoliton::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), k_ - 1)) + 1;
}

std::vector<std::uint32_t> lt_neighbors(std::uint64_t degree_seed, const RobustSoliton& dist) {
  Rng rng(degree_seed);
  const int degree = dist.sample(rng);
  const auto k = static_cast<std::uint32_t>(dist.k());
  // Floyd's sampling of `degree` distinct indices out of k.
  std::vector<std::uint32_t> picked;
  picked.reserve(static_cast<std::size_t>(degree));
  for (std::uint32_t j = k - static_cast<std::uint32_t>(degree); j < k; ++j) {
    const auto t = static_cast<std::uint32_t>(rng.below(j + 1ULL));
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
      picked.push_back(t);
    } else {
      picked.push_back(j);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

PeelingDecoder::PeelingDecoder(int k)
    : k_(k), known_(static_cast<std::size_t>(k), false), incidence_(static_cast<std::size_t>(k)) {
  if (k < 1) throw ParameterError("peeling decoder needs k >= 1");
}

int PeelingDecoder::add(std::span<const std::uint32_t> neighbors) {
  std::vector<std::uint32_t> pending;
  for (std::uint32_t s : neighbors) {
    if (s >= static_cast<std::uint32_t>(k_)) throw IntegrityError("LT neighbour index out of range");
    if (!known_[s]) pending.push_back(s);
  }
  if (pending.empty()) return recovered_count_;
  if (pending.size() == 1) {
    resolve(pending.front());
    return recovered_count_;
  }
  const auto id = static_cast<std::uint32_t>(packets_.size());
  for (std::uint32_t s : pending) incidence_[s].push_back(id);
  unresolved_.push_back(static_cast<int>(pending.size()));
  packets_.push_back(std::move(pending));
  return recovered_count_;
}

void PeelingDecoder::resolve(std::uint32_t symbol) {
  ripple_.push_back(symbol);
  while (!ripple_.empty()) {
    const std::uint32_t s = ripple_.back();
    ripple_.pop_back();
    if (known_[s]) continue;
    known_[s] = true;
    ++recovered_count_;
    for (std::uint32_t p : incidence_[s]) {
      if (--unresolved_[p] != 1) continue;
      for (std::uint32_t other : packets_[p]) {
        if (!known_[other]) {
          ripple_.push_back(other);
          break;
        }
      }
    }
    incidence_[s].clear();
  }
}

Codec::Codec(CodingMode mode, double epsilon, double oracle_exponent, std::uint64_t seed)
    : mode_(mode), epsilon_(epsilon), oracle_exponent_(oracle_exponent), seed_(seed) {
  if (!(epsilon > 0.0)) throw ConfigError("decode overhead epsilon must be positive");
  if (!(oracle_exponent > 0.0)) throw ConfigError("oracle exponent must be positive");
}

std::vector<CodedPacketId> Codec::encode(const SourceBlock& block, int budget, Rng& rng) const {
  if (block.k < 1) throw ParameterError("source block needs k >= 1");
  if (budget < block.k) {
    throw InfeasibleRate(fmt::format("coded budget {} is below the block size {}", budget, block.k));
  }
  std::vector<CodedPacketId> out(static_cast<std::size_t>(budget));
  for (int i = 0; i < budget; ++i) {
    auto& id = out[static_cast<std::size_t>(i)];
    id.source_id = block.source_id;
    id.generation = block.generation;
    id.index = static_cast<std::uint32_t>(i);
    id.degree_seed = mode_ == CodingMode::lt ? rng.next() : 0;
  }
  return out;
}

int Codec::oracle_threshold(int k) const {
  return static_cast<int>(std::ceil((1.0 + epsilon_) * k - 1e-9));
}

double Codec::oracle_failure_probability(int k) const {
  return std::min(1.0, std::pow(static_cast<double>(k), -oracle_exponent_));
}

DecodeResult Codec::decode(const SourceBlock& block,
                           std::span<const CodedPacketId> received) const {
  std::vector<const CodedPacketId*> distinct;
  distinct.reserve(received.size());
  for (const auto& id : received) {
    if (id.source_id != block.source_id || id.generation != block.generation) {
      throw IntegrityError(fmt::format(
          "coded packet (source {}, generation {}) does not belong to block (source {}, generation {})",
          id.source_id, id.generation, block.source_id, block.generation));
    }
    distinct.push_back(&id);
  }
  std::sort(distinct.begin(), distinct.end(),
            [](const auto* a, const auto* b) { return a->index < b->index; });
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](const auto* a, const auto* b) { return a->index == b->index; }),
                 distinct.end());

  const auto count = static_cast<int>(distinct.size());
  if (mode_ == CodingMode::oracle) {
    // threshold >= k + 1 > k, so short sets never decode.
    if (count < oracle_threshold(block.k)) return {false, 0};
    Rng draw(derive_seed(seed_ ^ mix64(block.source_id), block.generation));
    if (draw.uniform() < oracle_failure_probability(block.k)) return {false, 0};
    return {true, block.k};
  }

  const RobustSoliton dist(block.k);
  PeelingDecoder decoder(block.k);
  for (const auto* id : distinct) {
    decoder.add(lt_neighbors(id->degree_seed, dist));
    if (decoder.complete()) break;
  }
  if (count < block.k && decoder.complete()) {
    throw InvariantViolation("LT decoder recovered a block from fewer than k packets");
  }
  return {decoder.complete(), decoder.recovered()};
}

std::vector<double> overhead_profile(int k, int trials, Rng& rng) {
  if (k < 1) throw ParameterError("overhead_profile needs k >= 1");
  if (trials < 1) throw ParameterError("overhead_profile needs trials >= 1");
  const RobustSoliton dist(k);
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    PeelingDecoder decoder(k);
    int received = 0;
    while (!decoder.complete()) {
      decoder.add(lt_neighbors(rng.next(), dist));
      ++received;
    }
    ratios.push_back(static_cast<double>(received) / k);
  }
  return ratios;
}

}  // namespace manet
