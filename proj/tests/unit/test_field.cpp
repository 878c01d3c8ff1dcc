#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "tvstokes/field.hpp"
#include "tvstokes/field_io.hpp"

using namespace tvs;

TEST_CASE("inner product by hand") {
  const GridSpec g{2, 2, 1.0};
  CHECK(inner_product(ScalarField::constant(g, 1.0), ScalarField::constant(g, 1.0)) == 4.0);
  CHECK(inner_product(ScalarField(g), ScalarField::constant(g, 3.0)) == 0.0);

  const GridSpec gh{2, 2, 0.5};
  ScalarField u(gh, {1, 2, 3, 4}), v(gh, {4, 3, 2, 1});
  CHECK(inner_product(u, v) == doctest::Approx(5.0).epsilon(1e-15));

  CHECK_THROWS_AS(inner_product(u, ScalarField(GridSpec{2, 3, 0.5})), ShapeError);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(ScalarField(GridSpec{0, 3, 1.0}), ShapeError);
  CHECK_THROWS_AS(ScalarField(GridSpec{3, 3, 0.0}), ShapeError);
  CHECK(GridSpec{4, 7, 1.0}.extended() == GridSpec{5, 8, 1.0});
}

TEST_CASE("restrict and extend") {
  const GridSpec g{2, 2, 1.0};
  ScalarField u(g, {1, 2, 3, 4});
  CHECK(restrict(u, SubdomainRect::full(g)) == u);

  const auto top = SubdomainRect::from_one_based(1, 1, 1, 2, 2, 2);
  const ScalarField r = restrict(u, top);
  CHECK(r.rows() == 1);
  CHECK(r(0, 0) == 1.0);
  CHECK(r(0, 1) == 2.0);

  const auto corner = SubdomainRect::from_one_based(1, 1, 1, 1, 2, 2);
  const ScalarField e = extend(ScalarField(GridSpec{1, 1, 1.0}, {5.0}), corner);
  CHECK(e == ScalarField(g, {5, 0, 0, 0}));

  const auto out_of_bounds = SubdomainRect::from_one_based(1, 3, 1, 1, 3, 3);
  CHECK_THROWS(restrict(u, out_of_bounds));
  CHECK_THROWS_AS(extend(u, corner), ShapeError);
}

TEST_CASE("extension is adjoint to restriction") {
  const GridSpec g{7, 6, 0.7};
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> pick(1, 6);
    std::size_t i1 = pick(oracle::rng()), i2 = pick(oracle::rng());
    std::size_t j1 = pick(oracle::rng()), j2 = pick(oracle::rng());
    if (i1 > i2) std::swap(i1, i2);
    if (j1 > j2) std::swap(j1, j2);
    const auto r = SubdomainRect::from_one_based(i1, i2, j1, j2, g.rows, g.cols);
    const auto u = oracle::random_field<2>(r.grid(g.h));
    const auto v = oracle::random_field<2>(g);
    const double lhs = inner_product(extend(u, r), v);
    const double rhs = inner_product(u, restrict(v, r));
    CHECK(std::abs(lhs - rhs) <= 1e-14 * (1.0 + std::abs(lhs)));
    CHECK(restrict(extend(u, r), r) == u);
    CHECK(restrict(extend(restrict(v, r), r), r) == restrict(v, r));
  }
}

TEST_CASE("disjoint tiling sums to identity") {
  const GridSpec g{5, 7, 1.0};
  const auto v = oracle::random_field<1>(g);
  const std::vector<Interval> rows{{0, 2}, {2, 5}};
  const std::vector<Interval> cols{{0, 1}, {1, 4}, {4, 7}};
  ScalarField sum(g);
  for (auto ri : rows)
    for (auto ci : cols) {
      const SubdomainRect r{ri, ci, g.rows, g.cols};
      sum += extend(restrict(v, r), r);
    }
  CHECK(sum == v);
}

TEST_CASE("rect_plus and rect_minus") {
  const auto r = SubdomainRect::from_one_based(1, 2, 1, 2, 5, 5);
  CHECK(rect_plus(r) == SubdomainRect::from_one_based(1, 3, 1, 3, 5, 5));

  const auto corner = SubdomainRect::from_one_based(3, 5, 2, 5, 5, 5);
  CHECK(rect_plus(corner) == corner);
  CHECK(rect_minus(corner) == corner);

  // bottom edge only: grows right, not down
  const auto bottom = SubdomainRect::from_one_based(4, 5, 1, 2, 5, 5);
  CHECK(rect_plus(bottom) == SubdomainRect::from_one_based(4, 5, 1, 3, 5, 5));
  CHECK(rect_minus(bottom) == SubdomainRect::from_one_based(4, 5, 1, 1, 5, 5));

  CHECK_THROWS_AS(rect_minus(SubdomainRect::from_one_based(2, 2, 1, 3, 5, 5)),
                  DegenerateRectError);
}

TEST_CASE("stripe algebra exhaustively on 5x5") {
  const std::size_t n = 5;
  std::vector<SubdomainRect> all;
  for (std::size_t i1 = 1; i1 <= n; ++i1)
    for (std::size_t i2 = i1; i2 <= n; ++i2)
      for (std::size_t j1 = 1; j1 <= n; ++j1)
        for (std::size_t j2 = j1; j2 <= n; ++j2)
          all.push_back(SubdomainRect::from_one_based(i1, i2, j1, j2, n, n));
  for (const auto& r : all) {
    const auto p = rect_plus(r);
    CHECK(p.contains(r));
    CHECK(p.rows.size() <= r.rows.size() + 1);
    CHECK(p.cols.size() <= r.cols.size() + 1);
    // shrinking undoes growing unless growing reached the parent edge
    const bool new_edge = (!r.touches_bottom() && p.touches_bottom()) ||
                          (!r.touches_right() && p.touches_right());
    if (!new_edge) CHECK(rect_minus(p) == r);
    // monotone under inclusion
    for (const auto& s : all) {
      if (!r.contains(s)) continue;
      CHECK(rect_plus(r).contains(rect_plus(s)));
    }
  }
}

TEST_CASE("TVSF round trip") {
  const auto t = oracle::random_field<4>(GridSpec{3, 5, 0.25});
  std::stringstream ss;
  write_tvsf(ss, to_raw(t));
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "TVSF");
  CHECK(bytes.size() == 4 + 1 + 4 + 4 + 8 + 4 * 15 * 8);
  CHECK(static_cast<unsigned char>(bytes[4]) == 4);
  CHECK(static_cast<unsigned char>(bytes[5]) == 3);  // n2 little-endian
  const auto back = from_raw<4>(read_tvsf(ss));
  CHECK(back == t);

  std::stringstream again(bytes);
  CHECK_THROWS_AS(from_raw<2>(read_tvsf(again)), FormatError);
  std::stringstream junk("TVSQ....");
  CHECK_THROWS_AS(read_tvsf(junk), FormatError);
}
