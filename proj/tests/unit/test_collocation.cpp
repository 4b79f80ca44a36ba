#include "fracollo/collocation.hpp"

#include <doctest.h>

using namespace fracollo;

TEST_CASE("reference grids") {
  const auto one = reference_grid(1, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x == 0.5);
  CHECK(one[0].y == 0.5);

  const auto two = reference_grid(2, 1);
  REQUIRE(two.size() == 2);
  CHECK(two[0].x == 0.25);
  CHECK(two[1].x == 0.75);
  CHECK(two[1].y == 0.5);

  const auto five = reference_grid(5, 5);
  REQUIRE(five.size() == 25);
  double lo = 1, hi = 0;
  for (auto p : five) {
    lo = std::min({lo, p.x, p.y});
    hi = std::max({hi, p.x, p.y});
  }
  CHECK(lo == doctest::Approx(0.1));
  CHECK(hi == doctest::Approx(0.9));
}

TEST_CASE("affine map to a cell") {
  const Domain d = Domain::rectangle({0, 4, 1, 7});
  const auto m = BackgroundMesh::from_lines(d, {0, 1, 2, 4}, {1, 3, 5, 7});
  const std::vector<Point> ref{{0.5, 0.5}, {0, 0}, {1, 1}};
  const auto p = map_to_cell(m, 1, 1, ref);
  CHECK(p[0].x == 1.5);
  CHECK(p[0].y == 4.0);
  CHECK(p[1].x == 1.0);
  CHECK(p[2].y == 5.0);
  const auto w = map_to_cell(m, 2, 0, std::vector<Point>{{0.25, 0.5}, {0.75, 0.5}});
  CHECK(w[1].x - w[0].x == doctest::Approx(1.0));

  const Domain u = Domain::rectangle({0, 2, 0, 2});
  const auto um = BackgroundMesh::uniform(u, 2, 2);
  const auto id = map_to_cell(um, 0, 0, ref);
  CHECK(id[0].x == 0.5);
  CHECK(id[2].y == 1.0);
}

TEST_CASE("cell classes on simple shapes") {
  const Domain c = Domain::circle({0, 0}, 0.76);
  CHECK(classify_cell(c, {-0.2, 0.2, -0.2, 0.2}) == CellClass::interior);
  CHECK(classify_cell(c, {-1, -0.5, -1, -0.5}) == CellClass::corner1);
  const Domain h = Domain::rectangle({0, 1, 0, 1});
  CHECK(classify_cell(h, {0.5, 1.5, 0.2, 0.4}) == CellClass::edge23);
  CHECK(classify_cell(h, {2, 3, 2, 3}) == CellClass::outside);
}

TEST_CASE("rectangle fills every cell with 5x5 points") {
  const Domain r = Domain::rectangle({0, 1, 0, 1});
  const Box b{-0.25, 1.25, -0.25, 1.25};
  const auto m = BackgroundMesh::uniform(r, b, 6, 6);
  const auto set = build_collocation_set(m, r, 8, 8, DensityMode::nonuniform, 40);
  for (int j = 1; j < 5; ++j) {
    for (int i = 1; i < 5; ++i) CHECK(set.per_cell[static_cast<std::size_t>(j * 6 + i)] == 25);
  }
  CHECK(set.boundary.size() == 40);
  for (auto p : set.interior) CHECK(r.contains(p));
}

TEST_CASE("nonuniform set is denser near the circle boundary") {
  const Domain c = Domain::circle({0, 0}, 0.76);
  const auto m = BackgroundMesh::uniform(c, {-1, 1, -1, 1}, 4, 4);
  const auto uni = build_collocation_set(m, c, 8, 8, DensityMode::uniform, 16);
  const auto non = build_collocation_set(m, c, 8, 8, DensityMode::nonuniform, 16);
  for (auto p : non.interior) CHECK(c.contains(p));
  CHECK(uni.per_cell[5] == 64);
  CHECK(non.per_cell[5] == 25);
  CHECK(non.per_cell[0] > uni.per_cell[0]);
  CHECK(non.per_cell[1] == uni.per_cell[1]);
}

TEST_CASE("corner cell keeps exactly the candidates inside the domain") {
  const Domain c = Domain::circle({0, 0}, 0.76);
  const auto m = BackgroundMesh::uniform(c, {-1, 1, -1, 1}, 4, 4);
  const auto set = build_collocation_set(m, c, 10, 10, DensityMode::nonuniform, 16);
  const auto cand = map_to_cell(m, 0, 0, reference_grid(20, 20));
  int inside = 0;
  for (auto p : cand) inside += c.contains(p) ? 1 : 0;
  CHECK(set.per_cell[0] == inside);
  CHECK(set.per_cell[0] <= 400);
  CHECK(set.per_cell[0] > 0);
}
