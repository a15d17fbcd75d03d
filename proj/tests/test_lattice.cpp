#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "hfm/errors.hpp"
#include "hfm/lattice.hpp"

using namespace hfm;

TEST_CASE("small lattices") {
  auto pair = build_lattice(1, 2, Boundary::Free);
  CHECK(pair.num_sites() == 2);
  CHECK(pair.bonds().size() == 1);

  auto cube = build_lattice(3, 2, Boundary::Free);
  CHECK(cube.num_sites() == 8);
  CHECK(cube.bonds().size() == 12);

  auto ring = build_lattice(1, 4, Boundary::Periodic);
  CHECK(ring.num_sites() == 4);
  CHECK(ring.bonds().size() == 4);
}

TEST_CASE("bond counts for every supported shape") {
  for (int d = 1; d <= 3; ++d) {
    for (int side = 1; side <= 6; ++side) {
      const auto l = static_cast<std::size_t>(side);
      const std::size_t volume = static_cast<std::size_t>(std::pow(l, d));
      auto free = build_lattice(d, side, Boundary::Free);
      CAPTURE(d);
      CAPTURE(side);
      CHECK(free.num_sites() == volume);
      CHECK(free.bonds().size() == d * static_cast<std::size_t>(std::pow(l, d - 1)) * (l - 1));
      if (side >= 3) {
        auto per = build_lattice(d, side, Boundary::Periodic);
        CHECK(per.bonds().size() == d * volume);
      }
    }
  }
}

TEST_CASE("bonds are unique, sorted, in range and of unit length") {
  for (int d = 1; d <= 3; ++d) {
    for (int side = 1; side <= 5; ++side) {
      for (auto bc : {Boundary::Free, Boundary::Periodic}) {
        if (bc == Boundary::Periodic && side < 3) continue;
        auto lat = build_lattice(d, side, bc);
        std::set<Bond> seen;
        for (const auto& [i, j] : lat.bonds()) {
          CHECK(i < j);
          CHECK(j < lat.num_sites());
          CHECK(lat.distance_squared(i, j) == 1);
          CHECK(seen.insert({i, j}).second);
        }
        CHECK(std::is_sorted(lat.bonds().begin(), lat.bonds().end()));
      }
    }
  }
}

TEST_CASE("sites are lexicographic and index_of inverts them") {
  auto lat = build_lattice(3, 3, Boundary::Free);
  for (std::size_t i = 0; i < lat.num_sites(); ++i) CHECK(lat.index_of(lat.sites()[i]) == i);
  CHECK(std::is_sorted(lat.sites().begin(), lat.sites().end()));
  CHECK(lat.sites()[1] == Coord{0, 0, 1});
}

TEST_CASE("periodic distance uses minimum image") {
  auto ring = build_lattice(1, 6, Boundary::Periodic);
  CHECK(ring.distance_squared(0, 5) == 1);
  CHECK(ring.distance_squared(0, 3) == 9);
  auto chain = build_lattice(1, 6, Boundary::Free);
  CHECK(chain.distance_squared(0, 5) == 25);
}

TEST_CASE("invalid shapes are rejected") {
  CHECK_THROWS_AS(build_lattice(0, 2, Boundary::Free), ConfigError);
  CHECK_THROWS_AS(build_lattice(4, 2, Boundary::Free), ConfigError);
  CHECK_THROWS_AS(build_lattice(2, 0, Boundary::Free), ConfigError);
  CHECK_THROWS_AS(build_lattice(1, 2, Boundary::Periodic), ConfigError);
}

TEST_CASE("lattice strings") {
  auto lat = parse_lattice("d=3,L=2,bc=free");
  CHECK(lat == build_lattice(3, 2, Boundary::Free));
  CHECK(lat.spec() == "d=3,L=2,bc=free");
  CHECK(parse_lattice("L=4,d=1,bc=periodic") == build_lattice(1, 4, Boundary::Periodic));
  CHECK(parse_lattice(parse_lattice("d=2,L=5,bc=periodic").spec()) == build_lattice(2, 5, Boundary::Periodic));
  CHECK_THROWS_AS(parse_lattice("d=3,L=x"), ConfigError);
  CHECK_THROWS_AS(parse_lattice("d=3,L=2,bc=twisted"), ConfigError);
  CHECK_THROWS_AS(parse_lattice("d=3,L=2,q=1"), ConfigError);
  CHECK_THROWS_AS(parse_lattice(""), ConfigError);
}

TEST_CASE("momentum grids") {
  const double pi = std::numbers::pi;
  MomentumGrid two(1, 2);
  REQUIRE(two.size() == 2);
  CHECK(two.momentum(0)[0] == 0.0);
  CHECK(two.momentum(1)[0] == doctest::Approx(pi));

  MomentumGrid four(1, 4);
  REQUIRE(four.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(four.momentum(i)[0] == doctest::Approx(i * pi / 2));

  MomentumGrid cube(3, 2);
  CHECK(cube.size() == 8);
  int zeros = 0;
  for (std::size_t i = 0; i < cube.size(); ++i) zeros += cube.is_zero(i) ? 1 : 0;
  CHECK(zeros == 1);
  CHECK(cube.is_zero(cube.zero_index()));
}

TEST_CASE("momentum grids have L^d distinct modes") {
  for (int d = 1; d <= 3; ++d)
    for (int side = 1; side <= 6; ++side) {
      MomentumGrid g(d, side);
      CHECK(g.size() == static_cast<std::size_t>(std::pow(side, d)));
      std::set<Coord> distinct(g.modes().begin(), g.modes().end());
      CHECK(distinct.size() == g.size());
      for (const auto& n : g.modes())
        for (int a = 0; a < 3; ++a) CHECK((n[a] >= 0 && n[a] < (a < d ? side : 1)));
    }
  CHECK(momentum_grid(build_lattice(2, 3, Boundary::Periodic)).size() == 9);
}
