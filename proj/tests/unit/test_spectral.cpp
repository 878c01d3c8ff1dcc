#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "tvstokes/diff_ops.hpp"
#include "tvstokes/spectral.hpp"

using namespace tvs;

TEST_CASE("dct matrices") {
  CHECK(dct_matrix(1).matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  const Matrix c2 = dct_matrix(2).matrix;
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(c2(0, 0) - r) < 1e-15);
  CHECK(std::abs(c2(0, 1) - r) < 1e-15);
  CHECK(std::abs(c2(1, 0) - r) < 1e-15);
  CHECK(std::abs(c2(1, 1) + r) < 1e-15);
  for (std::size_t n = 1; n <= 16; ++n) {
    const Matrix c = dct_matrix(n).matrix;
    CHECK((c * c.transpose() - Matrix::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      CHECK(std::abs(c(0, j) - 1.0 / std::sqrt(static_cast<double>(n))) < 1e-15);
  }
  CHECK_THROWS_AS(dct_matrix(0), ShapeError);
}

TEST_CASE("dct blocks") {
  const DctPlan p = dct_matrix(7);
  CHECK(dct_block(p, {0, 7}, {0, 7}) == p.matrix);
  CHECK(dct_block(p, {0, 1}, {0, 7}) == p.matrix.topRows(1));
  Matrix cat(7, 7);
  cat << dct_block(p, {0, 7}, {0, 2}), dct_block(p, {0, 7}, {2, 3}), dct_block(p, {0, 7}, {3, 7});
  CHECK(cat == p.matrix);
  CHECK_THROWS_AS(dct_block(p, {0, 8}, {0, 1}), ShapeError);
}

TEST_CASE("spectral diagonal") {
  const auto s = dct_sigma(9, 1.0);
  CHECK(s[0] == 0.0);
  for (std::size_t k = 1; k < s.size(); ++k) {
    CHECK(s[k] > 0.0);
    CHECK(s[k] >= s[k - 1]);
  }
  const SpectralDiag d = SpectralDiag::for_grid({3, 5, 1.0});
  CHECK(d.sigma_rows.size() == 3);
  CHECK(d.sigma_cols.size() == 5);
  CHECK(d.inverse_eigenvalue(0, 0) == 0.0);
}

TEST_CASE("2d dct") {
  const GridSpec g{5, 6, 1.0};
  const auto u = oracle::random_field<1>(g);
  CHECK(max_abs(idct2(dct2(u)) - u) < 1e-12);
  CHECK(std::abs(norm(dct2(u)) - norm(u)) < 1e-12);

  const ScalarField c = dct2(ScalarField::constant(g, 2.0));
  CHECK(std::abs(c(0, 0) - 2.0 * std::sqrt(30.0)) < 1e-12);
  ScalarField rest = c;
  rest(0, 0) = 0.0;
  CHECK(max_abs(rest) < 1e-12);
}

TEST_CASE("laplacian pseudo-inverse against the SVD oracle") {
  for (auto g : {GridSpec{4, 4, 1.0}, GridSpec{5, 7, 1.0}, GridSpec{8, 8, 1.0}, GridSpec{3, 6, 0.5}}) {
    const oracle::Dense lap =
        oracle::assemble<1, 1>(g, [](const ScalarField& d) { return oracle::dense_laplacian_5pt(d); });
    const oracle::Dense ref = oracle::pinv(lap);
    const oracle::Dense mine =
        oracle::assemble<1, 1>(g, [](const ScalarField& d) { return laplacian_pinv(d); });
    CHECK((mine - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((lap * mine * lap - lap).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((mine * lap * mine - mine).cwiseAbs().maxCoeff() < 1e-10);

    const auto u = oracle::random_field<1>(g), v = oracle::random_field<1>(g);
    CHECK(std::abs(inner_product(laplacian_pinv(u), v) - inner_product(u, laplacian_pinv(v))) < 1e-12);
  }
  const GridSpec g{6, 4, 1.0};
  CHECK(max_abs(laplacian_pinv(ScalarField::constant(g, 4.0))) < 1e-13);
  CHECK(max_abs(laplacian_pinv(ScalarField(g))) == 0.0);
}

namespace {

TilingTriple make_triple(const GridSpec& g, Tiling a, std::array<std::size_t, 2> k, Tiling at,
                         Tiling b, std::array<std::size_t, 2> m) {
  TilingTriple t{a, at, b, k, m, {}, {}};
  t.source = rect_minus(t.a_k());
  t.target = rect_minus(t.b_m());
  (void)g;
  t.validate();
  return t;
}

}  // namespace

TEST_CASE("blockwise pseudo-inverse equals the global one") {
  const GridSpec g{6, 6, 1.0};
  const Tiling two = Tiling::uniform(6, 6, 2, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t m = 0; m < 4; ++m) {
      const auto t = make_triple(g, two, {k / 2, k % 2}, Tiling::uniform(6, 6, 3, 2), two,
                                 {m / 2, m % 2});
      const auto dk = oracle::random_field<1>(t.a_k().grid(1.0));
      const ScalarField ref = restrict(laplacian_pinv(extend(dk, t.a_k())), t.b_m());
      const ScalarField serial = laplacian_pinv_block(dk, t, Execution::Serial);
      const ScalarField par = laplacian_pinv_block(dk, t, Execution::Parallel);
      CHECK(max_abs(serial - ref) < 1e-10);
      CHECK(serial == par);
      CHECK(max_abs(laplacian_pinv_block(ScalarField(dk.grid()), t)) == 0.0);
    }
  }
  const auto full = SubdomainRect::full(g);
  const auto one = TilingTriple::trivial(g, full, full);
  const auto d = oracle::random_field<1>(g);
  CHECK(max_abs(laplacian_pinv_block(d, one) - laplacian_pinv(d)) < 1e-12);
}

TEST_CASE("chained operators split over an intermediate tiling") {
  // R_B (U T) E_A = sum_lambda (R_B U E_lambda)(R_lambda T E_A) for dense U, T
  const GridSpec g{5, 5, 1.0};
  const std::size_t n = g.size();
  const oracle::Dense u = oracle::Dense::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const oracle::Dense t = oracle::Dense::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const Tiling at = Tiling::uniform(5, 5, 2, 3);
  auto indices = [&](const SubdomainRect& r) {
    std::vector<Eigen::Index> out;
    for (std::size_t i = r.rows.begin; i < r.rows.end; ++i)
      for (std::size_t j = r.cols.begin; j < r.cols.end; ++j)
        out.push_back(static_cast<Eigen::Index>(i * g.cols + j));
    return out;
  };
  const auto a = indices(SubdomainRect::from_one_based(1, 3, 2, 4, 5, 5));
  const auto b = indices(SubdomainRect::from_one_based(2, 5, 1, 2, 5, 5));
  const oracle::Dense full = (u * t)(b, a);
  oracle::Dense sum = oracle::Dense::Zero(full.rows(), full.cols());
  for (std::size_t r = 0; r < at.rows.size(); ++r)
    for (std::size_t c = 0; c < at.cols.size(); ++c) {
      const auto l = indices(at.tile(r, c));
      sum += u(b, l) * t(l, a);
    }
  CHECK((sum - full).cwiseAbs().maxCoeff() < 1e-12);
}
