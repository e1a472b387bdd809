#include <doctest.h>

#include <bitset>
#include <cmath>
#include <numeric>

#include "manet/coding.hpp"
#include "manet/errors.hpp"

using namespace manet;

namespace {

// Robust soliton weights written out independently of the library.
std::vector<double> reference_soliton(int k, double c, double delta) {
  std::vector<double> rho(k + 1, 0.0), tau(k + 1, 0.0);
  rho[1] = 1.0 / k;
  for (int d = 2; d <= k; ++d) rho[d] = 1.0 / (d * (d - 1.0));
  const double R = c * std::log(k / delta) * std::sqrt(static_cast<double>(k));
  const int spike = std::max(1, std::min(k, static_cast<int>(std::floor(k / R))));
  for (int d = 1; d < spike; ++d) tau[d] = R / (d * static_cast<double>(k));
  tau[spike] = std::max(0.0, R * std::log(R / delta) / k);
  double z = 0.0;
  for (int d = 1; d <= k; ++d) z += rho[d] + tau[d];
  std::vector<double> mu(k + 1, 0.0);
  for (int d = 1; d <= k; ++d) mu[d] = (rho[d] + tau[d]) / z;
  return mu;
}

// GF(2) rank of neighbour sets (k <= 64).
int gf2_rank(std::vector<std::uint64_t> rows) {
  int rank = 0;
  for (int bit = 0; bit < 64; ++bit) {
    const std::uint64_t mask = 1ULL << bit;
    auto pivot = std::find_if(rows.begin() + rank, rows.end(),
                              [&](std::uint64_t r) { return (r & mask) != 0; });
    if (pivot == rows.end()) continue;
    std::swap(*pivot, rows[static_cast<std::size_t>(rank)]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != static_cast<std::size_t>(rank) && (rows[i] & mask)) rows[i] ^= rows[static_cast<std::size_t>(rank)];
    }
    ++rank;
  }
  return rank;
}

std::uint64_t as_mask(const std::vector<std::uint32_t>& nb) {
  std::uint64_t m = 0;
  for (auto s : nb) m |= 1ULL << s;
  return m;
}

}  // namespace

TEST_CASE("robust soliton matches the reference weights") {
  for (int k : {1, 2, 7, 40, 100, 1000}) {
    const RobustSoliton dist(k);
    const auto mu = reference_soliton(k, 0.03, 0.05);
    double total = 0.0;
    for (int d = 1; d <= k; ++d) {
      CHECK(dist.pmf(d) == doctest::Approx(mu[d]).epsilon(1e-9));
      total += dist.pmf(d);
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(dist.pmf(0) == 0.0);
    CHECK(dist.pmf(k + 1) == 0.0);
  }
  CHECK_THROWS_AS(RobustSoliton(0), ParameterError);
}

TEST_CASE("degree samples follow the distribution") {
  const RobustSoliton dist(50);
  Rng rng(3);
  std::vector<int> count(51, 0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++count[dist.sample(rng)];
  for (int d = 1; d <= 4; ++d) {
    const double p = dist.pmf(d);
    const double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(count[d] / static_cast<double>(draws) - p) < 5 * se);
  }
}

TEST_CASE("LT neighbours are distinct, sorted and reproducible") {
  const RobustSoliton dist(30);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto nb = lt_neighbors(seed, dist);
    REQUIRE_FALSE(nb.empty());
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
    CHECK(nb.back() < 30U);
    CHECK(nb == lt_neighbors(seed, dist));
  }
}

TEST_CASE("peeling success implies full GF(2) rank and recovery is monotone") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(40));
    const RobustSoliton dist(k);
    PeelingDecoder decoder(k);
    std::vector<std::uint64_t> rows;
    int last = 0;
    bool was_complete = false;
    for (int p = 0; p < 3 * k; ++p) {
      const auto nb = lt_neighbors(rng.next(), dist);
      rows.push_back(as_mask(nb));
      const int now = decoder.add(nb);
      CHECK(now >= last);
      last = now;
      if (was_complete) CHECK(decoder.complete());
      was_complete = decoder.complete();
      if (decoder.complete()) {
        CHECK(gf2_rank(rows) == k);
        CHECK(static_cast<int>(rows.size()) >= k);
      }
    }
  }
}

TEST_CASE("peeling on a hand-built example") {
  PeelingDecoder d(3);
  CHECK(d.add(std::vector<std::uint32_t>{0, 1}) == 0);
  CHECK(d.add(std::vector<std::uint32_t>{1, 2}) == 0);
  CHECK(d.add(std::vector<std::uint32_t>{2}) == 3);  // releases 2, then 1, then 0
  CHECK(d.complete());
  CHECK_THROWS_AS(d.add(std::vector<std::uint32_t>{3}), IntegrityError);
}

TEST_CASE("encode") {
  const Codec lt(CodingMode::lt, 1.0 / 6.0, 1.0, 1);
  Rng rng(2);
  const auto ids = lt.encode({5, 3, 4}, 9, rng);
  REQUIRE(ids.size() == 9);
  for (std::uint32_t i = 0; i < 9; ++i) {
    CHECK(ids[i].index == i);
    CHECK(ids[i].source_id == 5);
    CHECK(ids[i].generation == 3);
  }
  CHECK(ids[0].degree_seed != ids[1].degree_seed);
  const Codec oracle(CodingMode::oracle, 1.0 / 6.0, 1.0, 1);
  CHECK(oracle.encode({5, 3, 4}, 4, rng)[0].degree_seed == 0);
  CHECK_THROWS_AS(oracle.encode({5, 3, 4}, 3, rng), InfeasibleRate);
  CHECK_THROWS_AS(oracle.encode({5, 3, 0}, 3, rng), ParameterError);
  CHECK_THROWS_AS(Codec(CodingMode::lt, 0.0, 1.0, 1), ConfigError);
}

TEST_CASE("oracle threshold") {
  const Codec codec(CodingMode::oracle, 1.0 / 6.0, 1.0, 1);
  CHECK(codec.oracle_threshold(6) == 7);
  CHECK(codec.oracle_threshold(2) == 3);
  CHECK(codec.oracle_threshold(1) == 2);
  CHECK(codec.oracle_failure_probability(1) == 1.0);
  CHECK(codec.oracle_failure_probability(4) == 0.25);
  CHECK(Codec(CodingMode::oracle, 0.1, 2.0, 1).oracle_failure_probability(10) ==
        doctest::Approx(0.01));

  Rng rng(1);
  const SourceBlock block{0, 0, 6};
  const auto ids = codec.encode(block, 12, rng);
  // Six distinct (plus a duplicate) never decode.
  std::vector<CodedPacketId> six(ids.begin(), ids.begin() + 6);
  six.push_back(ids[0]);
  CHECK_FALSE(codec.decode(block, six).success);
  // A foreign packet is an integrity error.
  auto foreign = ids;
  foreign[3].source_id = 1;
  CHECK_THROWS_AS(codec.decode(block, foreign), IntegrityError);
}

TEST_CASE("oracle failure rate above the threshold is 1/k") {
  const int k = 6;
  const int blocks = 20000;
  int failures = 0;
  for (int b = 0; b < blocks; ++b) {
    const Codec codec(CodingMode::oracle, 1.0 / 6.0, 1.0, static_cast<std::uint64_t>(b));
    const SourceBlock block{static_cast<NodeId>(b), static_cast<std::uint64_t>(b % 7), k};
    Rng rng(static_cast<std::uint64_t>(b));
    const auto ids = codec.encode(block, 7, rng);
    const auto r = codec.decode(block, ids);
    if (!r.success) ++failures;
    else CHECK(r.recovered == k);
  }
  const double p = 1.0 / k;
  const double se = std::sqrt(p * (1 - p) / blocks);
  CHECK(std::abs(failures / static_cast<double>(blocks) - p) < 3 * se);
}

TEST_CASE("oracle decode is a deterministic function of the block") {
  const Codec a(CodingMode::oracle, 0.2, 1.0, 99);
  Rng rng(0);
  const SourceBlock block{3, 4, 5};
  const auto ids = a.encode(block, 10, rng);
  const auto first = a.decode(block, ids).success;
  for (int i = 0; i < 5; ++i) CHECK(a.decode(block, ids).success == first);
}

TEST_CASE("LT decode needs at least k distinct packets and is monotone in the received set") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(30));
    const Codec codec(CodingMode::lt, 1.0 / 6.0, 1.0, 7);
    const SourceBlock block{0, static_cast<std::uint64_t>(trial), k};
    const auto ids = codec.encode(block, 3 * k, rng);
    bool decoded = false;
    for (int m = 1; m <= 3 * k; ++m) {
      const auto r = codec.decode(block, std::span<const CodedPacketId>(ids).first(m));
      if (m < k) CHECK_FALSE(r.success);
      if (decoded) CHECK(r.success);
      decoded = r.success;
    }
  }
}

TEST_CASE("LT overhead profile") {
  Rng rng(8);
  const auto ratios = overhead_profile(100, 200, rng);
  REQUIRE(ratios.size() == 200);
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
  CHECK(mean >= 1.0);
  CHECK(mean < 2.0);
  for (double r : ratios) CHECK(r >= 1.0);
}
