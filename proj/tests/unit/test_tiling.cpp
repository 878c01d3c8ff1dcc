#include "doctest.h"
#include "tvstokes/tiling.hpp"

using namespace tvs;

TEST_CASE("split_evenly") {
  const auto p = split_evenly(2, 12, 3);
  REQUIRE(p.size() == 3);
  CHECK(p[0] == Interval{2, 6});
  CHECK(p[1] == Interval{6, 9});
  CHECK(p[2] == Interval{9, 12});
  CHECK(split_evenly(0, 2, 5).size() == 2);
  CHECK(split_evenly(3, 3, 2).empty());
}

TEST_CASE("tiling validation") {
  Tiling t = Tiling::uniform(7, 5, 2, 2);
  t.validate();
  CHECK(t.count() == 4);
  CHECK(t.area_spread() == doctest::Approx(12.0 / 6.0));
  t.rows = {{0, 3}, {4, 7}};
  CHECK_THROWS_AS(t.validate(), TilingError);
  t.rows = {{0, 3}, {3, 6}};
  CHECK_THROWS_AS(t.validate(), TilingError);
}

TEST_CASE("halo condition") {
  const GridSpec g{6, 6, 1.0};
  const Tiling two = Tiling::uniform(6, 6, 2, 2);
  TilingTriple t{two, two, two, {0, 0}, {1, 1}, {}, {}};
  t.source = SubdomainRect::from_one_based(1, 2, 1, 2, 6, 6);
  t.target = SubdomainRect::from_one_based(4, 6, 4, 6, 6, 6);
  t.validate();
  CHECK(t.exact_halo());
  t.source = SubdomainRect::from_one_based(1, 3, 1, 2, 6, 6);
  CHECK_THROWS_AS(t.validate(), TilingError);
  t.source = SubdomainRect::from_one_based(1, 1, 1, 1, 6, 6);
  t.validate();
  CHECK_FALSE(t.exact_halo());
  t.k = {2, 0};
  CHECK_THROWS_AS(t.validate(), TilingError);
  (void)TilingTriple::trivial(g, SubdomainRect::full(g), SubdomainRect::full(g));
}
