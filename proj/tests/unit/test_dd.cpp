#include "doctest.h"
#include "oracle.hpp"
#include "tvstokes/dd.hpp"
#include "tvstokes/diff_ops.hpp"

using namespace tvs;

namespace {

template <std::size_t C>
double max_pointwise_row(const Field<C>& p, std::size_t row) {
  double m = 0.0;
  for (std::size_t k = 0; k < p.plane_size(); ++k)
    m = std::max(m, std::hypot(p.plane(2 * row)[k], p.plane(2 * row + 1)[k]));
  return m;
}

DdLayout layout_on(std::size_t rows, std::size_t cols, std::size_t m2, std::size_t m1,
                   std::size_t sy = 3, std::size_t sx = 2) {
  return build_layout(GridSpec{rows, cols, 1.0}, m2, m1, sy, sx);
}

}  // namespace

TEST_CASE("layout") {
  const DdLayout one = layout_on(7, 9, 1, 1);
  REQUIRE(one.count() == 1);
  CHECK(one.rect(0) == SubdomainRect::full(GridSpec{7, 9, 1.0}));

  const DdLayout two = build_layout(GridSpec{4, 10, 1.0}, 1, 2, 2, 2);
  CHECK(two.rect(0).cols == Interval{0, 6});  // 1-based 1..6
  CHECK(two.rect(1).cols == Interval{4, 10});  // 1-based 5..10

  CHECK_THROWS_AS(build_layout(GridSpec{10, 10, 1.0}, 3, 1, 5, 2), LayoutError);
  CHECK_THROWS_AS(build_layout(GridSpec{10, 10, 1.0}, 2, 2, 1, 2), LayoutError);

  std::uniform_int_distribution<std::size_t> pick(1, 4), size(12, 40), ov(2, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const GridSpec g{size(oracle::rng()), size(oracle::rng()), 1.0};
    const std::size_t m2 = pick(oracle::rng()), m1 = pick(oracle::rng());
    const std::size_t sy = ov(oracle::rng()), sx = ov(oracle::rng());
    DdLayout l;
    try {
      l = build_layout(g, m2, m1, sy, sx);
    } catch (const LayoutError&) {
      continue;
    }
    std::vector<int> hits(g.size(), 0);
    for (const auto& r : l.rects)
      for (std::size_t i = r.rows.begin; i < r.rows.end; ++i)
        for (std::size_t j = r.cols.begin; j < r.cols.end; ++j) ++hits[i * g.cols + j];
    CHECK(std::count(hits.begin(), hits.end(), 0) == 0);
    for (std::size_t a = 0; a + 1 < m2; ++a)
      CHECK(l.rect(a * m1).rows.end - l.rect((a + 1) * m1).rows.begin == sy);
    for (std::size_t b = 0; b + 1 < m1; ++b) CHECK(l.rect(b).cols.end - l.rect(b + 1).cols.begin == sx);
    CHECK(build_layout(g, m2, m1, sy, sx).rects == l.rects);
  }

  const DdLayout ext = layout_on(13, 13, 2, 2);
  const DdLayout img = ext.restricted_to(GridSpec{12, 12, 1.0});
  for (std::size_t m = 0; m < ext.count(); ++m) {
    CHECK(img.rect(m).rows == intersect(ext.rect(m).rows, {0, 12}));
    CHECK(img.rect(m).cols == intersect(ext.rect(m).cols, {0, 12}));
  }
}

TEST_CASE("partition of unity") {
  const auto single = build_partition_of_unity(layout_on(5, 6, 1, 1));
  CHECK(single.thetas[0] == ScalarField::constant(GridSpec{5, 6, 1.0}, 1.0));

  const auto two = build_partition_of_unity(build_layout(GridSpec{1, 10, 1.0}, 1, 2, 2, 2));
  CHECK(two.thetas[0](0, 4) == doctest::Approx(2.0 / 3.0));
  CHECK(two.thetas[0](0, 5) == doctest::Approx(1.0 / 3.0));
  CHECK(two.thetas[1](0, 4) == doctest::Approx(1.0 / 3.0));
  CHECK(two.thetas[1](0, 5) == doctest::Approx(2.0 / 3.0));

  for (auto [n, m, s] : {std::tuple{30, 3, 2}, std::tuple{41, 4, 5}, std::tuple{25, 2, 8}}) {
    const auto l = build_layout(GridSpec{static_cast<std::size_t>(n), static_cast<std::size_t>(n + 3), 1.0},
                                static_cast<std::size_t>(m), static_cast<std::size_t>(m),
                                static_cast<std::size_t>(s), static_cast<std::size_t>(s));
    const auto pou = build_partition_of_unity(l);
    ScalarField sum(l.grid);
    for (std::size_t k = 0; k < l.count(); ++k) {
      const ScalarField& t = pou.thetas[k];
      sum += t;
      for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j) {
          CHECK(t(i, j) >= 0.0);
          if (!l.rect(k).rows.contains(i) || !l.rect(k).cols.contains(j)) CHECK(t(i, j) == 0.0);
        }
      // slope of the ramps is at most 1 / (s + 1) per axis
      CHECK(max_abs(forward_diff(t, Axis::X)) <= 1.0 / (s + 1) + 1e-14);
      CHECK(max_abs(forward_diff(t, Axis::Y)) <= 1.0 / (s + 1) + 1e-14);
    }
    CHECK(max_abs(sum - ScalarField::constant(l.grid, 1.0)) < 1e-14);
  }
}

TEST_CASE("alpha hat") {
  CHECK(alpha_hat_for(1, 1) == 1.0);
  CHECK(alpha_hat_for(1, 4) == 0.5);
  CHECK(alpha_hat_for(3, 1) == 0.5);
  CHECK(alpha_hat_for(3, 3) == 0.25);
  CHECK(alpha_hat_for(2, 5) == 0.25);
}

TEST_CASE("tilings") {
  const DdLayout one = layout_on(8, 8, 1, 1);
  const TilingTriple t1 = build_tilings(one, 0, 0);
  CHECK(t1.a.count() == 1);
  CHECK(t1.b.count() == 1);
  CHECK(t1.atilde.count() == 1);

  const DdLayout l = build_layout(GridSpec{9, 9, 1.0}, 2, 2, 2, 2);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t m = 0; m < 4; ++m) {
      const TilingTriple t = build_tilings(l, k, m);  // validates cover and halo
      CHECK(t.source == l.grown(k));
      CHECK(t.target == l.grown(m));
    }

  const DdLayout big = build_layout(GridSpec{65, 65, 1.0}, 3, 3, 4, 3);
  for (std::size_t k = 0; k < 9; ++k)
    for (std::size_t m = 0; m < 9; ++m) {
      const TilingTriple t = build_tilings(big, k, m);
      CHECK(t.a.area_spread() <= 4.0);
      CHECK(t.b.area_spread() <= 4.0);
      CHECK(t.atilde.area_spread() <= 4.0);
    }
}

TEST_CASE("omega0 from blockwise projections") {
  const GridSpec g{17, 19, 1.0};
  const DdLayout l = build_layout(g, 2, 3, 3, 3);
  const auto pou = build_partition_of_unity(l);
  const TfsProblem prob{project_global(oracle::random_field<2>(g))};
  const TfsSubdomains sub(prob, l, pou);
  const auto p = oracle::random_field<4>(g);
  std::vector<VectorField2> divs;
  for (std::size_t k = 0; k < l.count(); ++k) divs.push_back(sub.weighted_divergence(k, p));
  for (std::size_t m = 0; m < l.count(); ++m) {
    TensorField2x2 others(g);
    for (std::size_t k = 0; k < l.count(); ++k)
      if (k != m) others += multiply_pointwise(p, pou.thetas[k]);
    VectorField2 ref = prob.f;
    ref -= project_global(multi_div(others));
    const VectorField2 w = sub.omega0(m, divs);
    CHECK(max_abs(w - restrict(ref, l.grown(m))) < 1e-10);
    CHECK(w == sub.omega0(m, divs, Execution::Parallel));
  }

  std::vector<VectorField2> zero;
  for (std::size_t k = 0; k < l.count(); ++k) zero.push_back(sub.weighted_divergence(k, TensorField2x2(g)));
  CHECK(sub.omega0(2, zero) == restrict(prob.f, l.grown(2)));
}

TEST_CASE("localized TFS inner loop equals the full-grid loop") {
  const GridSpec g{25, 25, 1.0};
  const DdLayout l = build_layout(g, 2, 2, 4, 3);
  const auto pou = build_partition_of_unity(l);
  const TfsProblem prob = make_tfs_problem(tangent_field(oracle::random_field<1>(GridSpec{24, 24, 1.0})), 0.15);
  const TfsSubdomains sub(prob, l, pou);
  TensorField2x2 p = oracle::random_field<4>(g, 0.5);
  std::vector<VectorField2> divs;
  for (std::size_t k = 0; k < l.count(); ++k) divs.push_back(sub.weighted_divergence(k, p));

  for (std::size_t m = 0; m < l.count(); ++m) {
    const TensorField2x2 start = multiply_pointwise(p, pou.thetas[m]);
    std::vector<TensorField2x2> local, global;
    sub.inner(m, restrict(start, l.rect(m)), sub.omega0(m, divs), 0.125, 50, &local);
    inner_tfs_global(m, p, start, prob, pou, 0.125, 50, &global);
    double worst = 0.0;
    for (std::size_t it = 0; it < 50; ++it) {
      worst = std::max(worst, max_abs(local[it] - restrict(global[it], l.rect(m))));
      // nothing leaks outside the subdomain in the full-grid loop
      CHECK(max_abs(global[it] - extend(restrict(global[it], l.rect(m)), l.rect(m))) == 0.0);
      CHECK(max_pointwise_row(local[it], 0) <= 1.0 + 1e-15);
    }
    CHECK(worst < 1e-10);
  }

  const TfsProblem zero{VectorField2(g)};
  const TfsSubdomains zsub(zero, l, pou);
  const auto out = zsub.inner(0, TensorField2x2(l.rect(0).grid(1.0)),
                              VectorField2(l.grown(0).grid(1.0)), 0.125, 5);
  CHECK(max_abs(out) == 0.0);
}

TEST_CASE("peak working set of the blockwise pseudo-inverse") {
  const DdLayout l = build_layout(GridSpec{65, 65, 1.0}, 3, 3, 4, 3);
  for (std::size_t k = 0; k < 9; k += 4) {
    const TilingTriple t = build_tilings(l, k, 8 - k);
    const LocalPinvPlan plan(t, 1.0);
    std::size_t largest = 0;
    for (const Tiling* tl : {&t.a, &t.atilde, &t.b})
      for (std::size_t r = 0; r < tl->rows.size(); ++r)
        for (std::size_t c = 0; c < tl->cols.size(); ++c) largest = std::max(largest, tl->tile(r, c).size());
    CHECK(plan.peak_summand_doubles() <= 6 * largest);
  }
}

TEST_CASE("localized IR inner loop equals the full-grid loop") {
  const GridSpec g{23, 21, 1.0};
  const DdLayout l = build_layout(g, 3, 2, 4, 3);
  const auto pou = build_partition_of_unity(l);
  const IrProblem prob{oracle::random_field<1>(g, 3.0)};
  const IrSubdomains sub(prob, l, pou);
  const auto p = oracle::random_field<2>(g, 0.5);
  for (std::size_t m = 0; m < l.count(); ++m) {
    const VectorField2 start = multiply_pointwise(p, pou.thetas[m]);
    std::vector<VectorField2> local, global;
    sub.inner(m, restrict(start, l.rect(m)), sub.others(m, p), 0.125, 30, &local);
    inner_ir_global(m, p, start, prob, pou, 0.125, 30, &global);
    double worst = 0.0;
    for (std::size_t it = 0; it < 30; ++it) {
      worst = std::max(worst, max_abs(local[it] - restrict(global[it], l.rect(m))));
      for (std::size_t k = 0; k < local[it].plane_size(); ++k)
        CHECK(std::hypot(local[it].plane(0)[k], local[it].plane(1)[k]) <=
              restrict(pou.thetas[m], l.rect(m)).values()[k] + 1e-15);
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("weighted update guards zero weight") {
  std::vector<double> vx{0.5, 0.3}, vy{0.1, 0.0}, px{0.0, 2.0}, py{0.0, 1.0}, th{0.0, 0.0};
  weighted_update(vx, vy, px, py, th, 0.125);
  CHECK(vx == std::vector<double>{0.0, 0.0});
  CHECK(vy == std::vector<double>{0.0, 0.0});
}

TEST_CASE("single subdomain reduces to the plain solver") {
  SolverConfig plain;
  plain.tol = 1e-300;
  DdConfig dd;
  dd.alpha_hat = 1.0;
  dd.max_it = 6;
  dd.outer_tol = 1e-300;

  const GridSpec img{10, 10, 1.0};
  const auto d0 = oracle::random_field<1>(img);
  const DdLayout l = build_layout(img.extended(), 1, 1, 0, 0);
  const auto pou = build_partition_of_unity(l);

  const VectorField2 tau0 = tangent_field(d0);
  plain.max_it = 60;
  const auto ref = chambolle_tfs(tau0, plain);
  const auto dds = dd_solve(make_tfs_problem(tau0, plain.delta), l, pou, dd);
  REQUIRE(dds.trace.values.size() == 7);
  for (std::size_t n = 0; n < 7; ++n)
    CHECK(std::abs(dds.trace.values[n] - ref.trace.values[10 * n]) <= 1e-12 * ref.trace.values[0]);

  const DdLayout li = l.restricted_to(img);
  const auto pi = pou.restricted_to(img);
  const ScalarField f = irv2_data(d0, ScalarField(img), 10.0);
  const auto ir_ref = chambolle_ir(f, plain);
  const auto ir_dd = dd_solve(IrProblem{f}, li, pi, dd);
  for (std::size_t n = 0; n < 7; ++n) CHECK(ir_dd.trace.values[n] == ir_ref.trace.values[10 * n]);
  CHECK(ir_dd.p == ir_ref.p);
}

TEST_CASE("dd outer loop") {
  const GridSpec img{20, 20, 1.0};
  const DdLayout l = build_layout(img.extended(), 2, 2, 4, 3);
  const auto pou = build_partition_of_unity(l);
  DdConfig cfg;
  cfg.max_it = 30;

  const auto zero = dd_solve(TfsProblem{VectorField2(img.extended())}, l, pou, cfg);
  CHECK(max_abs(zero.p) == 0.0);

  const auto d0 = oracle::random_field<1>(img);
  const TfsProblem prob = make_tfs_problem(tangent_field(d0), 0.15);
  for (InnerStart s : {InnerStart::Current, InnerStart::Previous}) {
    cfg.start = s;
    const auto a = dd_solve(prob, l, pou, cfg);
    for (std::size_t n = 1; n < a.trace.values.size(); ++n)
      CHECK(a.trace.values[n] <= a.trace.values[n - 1] + 1e-10);
    CHECK(max_pointwise_row(a.p, 0) <= 1.0 + 1e-14);
    CHECK(max_pointwise_row(a.p, 1) <= 1.0 + 1e-14);
    cfg.exec = Execution::Parallel;
    CHECK(dd_solve(prob, l, pou, cfg).p == a.p);
    cfg.exec = Execution::Serial;
  }

  const IrProblem ir{irv2_data(d0, ScalarField(img), 10.0)};
  const auto li = l.restricted_to(img);
  const auto pi = pou.restricted_to(img);
  const auto b = dd_solve(ir, li, pi, cfg);
  for (std::size_t n = 1; n < b.trace.values.size(); ++n)
    CHECK(b.trace.values[n] <= b.trace.values[n - 1] + 1e-10);
  cfg.exec = Execution::Parallel;
  CHECK(dd_solve(ir, li, pi, cfg).trace.values == b.trace.values);

  int calls = 0;
  dd_solve(ir, li, pi, cfg, [&](std::size_t, double) { return ++calls < 3; });
  CHECK(calls == 3);
}
