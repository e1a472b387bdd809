#include <doctest.h>

#include <numeric>

#include "manet/errors.hpp"
#include "manet/grid.hpp"

using namespace manet;

TEST_CASE("cell coordinates and flat index") {
  CellGrid grid(4);
  CHECK(grid.cell_count() == 16);
  CHECK(grid.cell_side() == 0.25);
  CHECK(grid.coord_of({0.0, 0.0}) == CellCoord{0, 0});
  CHECK(grid.coord_of({0.26, 0.74}) == CellCoord{1, 2});
  CHECK(grid.coord_of({0.9999999999999999, 0.5}) == CellCoord{3, 2});
  CHECK(grid.index({1, 2}) == 6);
  CHECK(grid.coord(6) == CellCoord{1, 2});
}

TEST_CASE("rebuild buckets every node exactly once") {
  Rng rng(11);
  const auto positions = reshuffle(5000, rng);
  const auto grid = build_grid(positions, 9);
  CHECK(grid.mean_occupancy() == doctest::Approx(5000.0 / 81.0));
  std::size_t total = 0;
  std::vector<int> seen(positions.size(), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    total += grid.occupancy(c);
    for (NodeId v : grid.occupants(c)) {
      ++seen[v];
      CHECK(grid.cell_of(v) == c);
      CHECK(grid.index(grid.coord_of(positions[v])) == c);
    }
  }
  CHECK(total == positions.size());
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
}

TEST_CASE("side count rounding") {
  CHECK(round_side_count(13.45, false) == 13);
  CHECK(round_side_count(13.45, true) == 12);
  CHECK(round_side_count(31.62, true) == 33);
  CHECK(round_side_count(1.0, true) == 3);
  CHECK(round_side_count(0.2, false) == 1);
  CHECK_THROWS_AS(round_side_count(0.0, false), ConfigError);
  CHECK_THROWS_AS(CellGrid(0), ConfigError);
}
