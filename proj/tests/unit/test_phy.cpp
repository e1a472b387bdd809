#include <doctest.h>

#include <cmath>
#include <numbers>

#include "manet/errors.hpp"
#include "manet/phy.hpp"

using namespace manet;

namespace {

// Direct transcription of the protocol model used as a reference.
bool reference_ok(const TransmissionAttempt& a, std::span<const TransmissionAttempt> batch,
                  std::span<const Position> pos, double delta, Geometry g) {
  const double link = distance(pos[a.tx], pos[a.rx], g);
  if (link > a.radius) return false;
  for (const auto& other : batch) {
    if (other.tx == a.tx) continue;
    if (distance(pos[other.tx], pos[a.rx], g) < (1.0 + delta) * link) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("protocol model examples") {
  const std::vector<Position> pos = {
      {0.25, 0.5}, {0.5, 0.5}, {0.5, 0.0}, {0.5, 0.125}, {0.9, 0.9}};
  const TransmissionAttempt link{0, 1, 0.3, 0};
  // Alone and within radius.
  CHECK(protocol_check(std::vector{link}, pos, 1.0, Geometry::square) == std::vector<bool>{true});
  // Out of radius.
  CHECK(protocol_check(std::vector{TransmissionAttempt{0, 1, 0.2, 0}}, pos, 1.0,
                       Geometry::square) == std::vector<bool>{false});
  // Interferer exactly at (1 + delta) * 0.25 = 0.5: the comparison is inclusive.
  const TransmissionAttempt far{2, 4, 1.0, 0};
  CHECK(protocol_check(std::vector{link, far}, pos, 1.0, Geometry::square)[0]);
  // Interferer at 0.375 < 0.5 breaks the link.
  const TransmissionAttempt near{3, 4, 1.0, 0};
  CHECK_FALSE(protocol_check(std::vector{link, near}, pos, 1.0, Geometry::square)[0]);
  // One transmitter serving two receivers does not interfere with itself.
  CHECK(protocol_check(std::vector{link, TransmissionAttempt{0, 3, 0.5, 0}}, pos, 1.0,
                       Geometry::square) == std::vector<bool>{true, true});
}

TEST_CASE("protocol model misuse") {
  const std::vector<Position> pos = {{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}};
  CHECK_THROWS_AS(protocol_check(std::vector{TransmissionAttempt{0, 1, 1, 0},
                                             TransmissionAttempt{2, 1, 1, 1}},
                                 pos, 0.4, Geometry::torus),
                  MisuseError);
  CHECK_THROWS_AS(protocol_check(std::vector{TransmissionAttempt{1, 1, 1, 0}}, pos, 0.4,
                                 Geometry::torus),
                  MisuseError);
  CHECK_THROWS_AS(protocol_check(std::vector{TransmissionAttempt{0, 7, 1, 0}}, pos, 0.4,
                                 Geometry::torus),
                  MisuseError);
  CHECK(protocol_check({}, pos, 0.4, Geometry::torus).empty());
}

TEST_CASE("protocol model agrees with the reference on random batches") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pos = reshuffle(40, rng);
    std::vector<TransmissionAttempt> batch;
    for (int i = 0; i < 12; ++i) {
      const auto tx = static_cast<NodeId>(rng.below(40));
      auto rx = static_cast<NodeId>(rng.below(40));
      if (rx == tx) rx = (rx + 1) % 40;
      batch.push_back({tx, rx, 0.05 + 0.5 * rng.uniform(), 0});
    }
    const Geometry g = trial % 2 ? Geometry::torus : Geometry::square;
    const auto ok = protocol_check(batch, pos, 0.4, g);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CHECK(ok[i] == reference_ok(batch[i], batch, pos, 0.4, g));
    }
  }
}

TEST_CASE("3x3 coloring separates neighbours") {
  const auto schedule = color_cells(9, 9);
  for (int c = 0; c < 9; ++c) {
    for (int r = 0; r < 9; ++r) {
      const int color = schedule.color(CellCoord{c, r});
      CHECK(color >= 0);
      CHECK(color < 9);
      for (int dc = -1; dc <= 1; ++dc) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (dc == 0 && dr == 0) continue;
          const CellCoord nb{(c + dc + 9) % 9, (r + dr + 9) % 9};
          CHECK(schedule.color(nb) != color);
        }
      }
    }
  }
  CHECK(schedule.color(std::size_t{10}) == schedule.color(CellCoord{1, 1}));
  CHECK_THROWS_AS(color_cells(9, 8), UnsupportedConfig);
}

TEST_CASE("same-colour cells are admissible for guard zones up to sqrt(2) - 1") {
  // One link per cell of one colour, endpoints anywhere inside the cell.
  Rng rng(8);
  const int g = 12;
  const double s = 1.0 / g;
  const auto schedule = color_cells(g, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const int color = static_cast<int>(rng.below(9));
    std::vector<Position> pos;
    std::vector<TransmissionAttempt> batch;
    for (int c = 0; c < g; ++c) {
      for (int r = 0; r < g; ++r) {
        if (schedule.color(CellCoord{c, r}) != color) continue;
        const auto tx = static_cast<NodeId>(pos.size());
        pos.push_back({(c + rng.uniform()) * s, (r + rng.uniform()) * s});
        pos.push_back({(c + rng.uniform()) * s, (r + rng.uniform()) * s});
        batch.push_back({tx, tx + 1, std::numbers::sqrt2 * s, color});
      }
    }
    const auto ok = protocol_check(batch, pos, 0.4, Geometry::torus);
    CHECK(std::all_of(ok.begin(), ok.end(), [](bool b) { return b; }));
  }

  // Worst case: receiver in the far corner, interferer three cells over.
  const double e = 1e-6;
  const std::vector<Position> pos = {{e, e}, {s - e, s - e}, {3 * s + e, s - e}, {3 * s + 2 * e, s - 2 * e}};
  const std::vector<TransmissionAttempt> batch = {{0, 1, std::numbers::sqrt2 * s, 0},
                                                  {2, 3, std::numbers::sqrt2 * s, 0}};
  CHECK(protocol_check(batch, pos, 0.4, Geometry::torus)[0]);
  CHECK_FALSE(protocol_check(batch, pos, 0.5, Geometry::torus)[0]);
}

TEST_CASE("good-cell band") {
  const auto band = good_band(10.0);
  CHECK(band.lo == 10);
  CHECK(band.hi == 11);
  CHECK(band.contains(10));
  CHECK(band.contains(11));
  CHECK_FALSE(band.contains(9));
  CHECK_FALSE(band.contains(12));
  // Empty for small means.
  CHECK(good_band(8.0).lo > good_band(8.0).hi);
  CHECK(good_band(20.0).lo == 19);
  CHECK(good_band(20.0).hi == 22);
}

TEST_CASE("classification matches a direct count") {
  Rng rng(4);
  const auto pos = reshuffle(4000, rng);
  const auto grid = build_grid(pos, 20);
  const double M = grid.mean_occupancy();
  const auto good = classify_good_cells(grid, M);
  std::vector<int> count(grid.cell_count(), 0);
  for (const auto& p : pos) ++count[grid.index(grid.coord_of(p))];
  std::vector<std::size_t> expected;
  for (std::size_t c = 0; c < count.size(); ++c) {
    if (count[c] >= std::ceil(0.9 * M) + 1 && count[c] <= std::floor(1.1 * M)) expected.push_back(c);
  }
  CHECK(good == expected);
  CHECK_THROWS_AS(classify_good_cells(grid, 0.0), MisuseError);
}

TEST_CASE("highway oracle and packet sizes") {
  CHECK(highway_capacity(10, 10.0, Scheme::slow) == 1);
  CHECK(highway_capacity(9, 10.0, Scheme::slow) == 0);
  CHECK(highway_capacity(12, 10.0, Scheme::slow) == 0);
  CHECK_THROWS_AS(highway_capacity(10, 10.0, Scheme::fast), MisuseError);
  CHECK(fast_packet_size(18.0, 9) == doctest::Approx(1.0));
  CHECK(slow_packet_size(1.0, 1.0, 9, 100.0) == doctest::Approx(10.0 / (11.0 * 9.0 * 10.0)));
}

TEST_CASE("audit throws on the first inadmissible transmission") {
  const std::vector<Position> pos = {{0.1, 0.1}, {0.2, 0.1}, {0.25, 0.1}, {0.3, 0.1}};
  ProtocolAudit audit(pos, 0.4, Geometry::square);
  audit.check(std::vector{TransmissionAttempt{0, 1, 0.2, 0}});
  CHECK(audit.batches() == 1);
  CHECK(audit.attempts() == 1);
  CHECK_THROWS_AS(audit.check(std::vector{TransmissionAttempt{0, 1, 0.2, 0},
                                          TransmissionAttempt{2, 3, 0.2, 0}}),
                  InvariantViolation);
}
