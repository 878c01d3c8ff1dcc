#include "tvstokes/spectral.hpp"

#include <cmath>
#include <numbers>

namespace tvs {
namespace {

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

ConstMap as_matrix(const ScalarField& f) {
  return ConstMap(f.values().data(), static_cast<Eigen::Index>(f.rows()),
                  static_cast<Eigen::Index>(f.cols()));
}

MutMap as_matrix(ScalarField& f) {
  return MutMap(f.values().data(), static_cast<Eigen::Index>(f.rows()),
                static_cast<Eigen::Index>(f.cols()));
}

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

DctPlan dct_matrix(std::size_t n) {
  if (n == 0) throw ShapeError("DCT size must be at least 1");
  DctPlan plan{n, Matrix(idx(n), idx(n))};
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  const double pi = std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = (k == 0) ? 1.0 / std::numbers::sqrt2
                                : std::cos(static_cast<double>(k * (2 * j + 1)) * pi /
                                           (2.0 * static_cast<double>(n)));
      plan.matrix(idx(k), idx(j)) = scale * v;
    }
  }
  return plan;
}

Matrix dct_block(const DctPlan& plan, const Interval& rows, const Interval& cols) {
  if (rows.empty() || cols.empty() || rows.end > plan.n || cols.end > plan.n) {
    throw ShapeError("DCT block out of range");
  }
  return plan.matrix.block(idx(rows.begin), idx(cols.begin), idx(rows.size()),
                           idx(cols.size()));
}

std::vector<double> dct_sigma(std::size_t n, double h) {
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = 2.0 / h *
           std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(n)));
  }
  return s;
}

SpectralDiag SpectralDiag::for_grid(const GridSpec& grid) {
  return {dct_sigma(grid.rows, grid.h), dct_sigma(grid.cols, grid.h), grid.h};
}

double SpectralDiag::inverse_eigenvalue(std::size_t i, std::size_t j) const {
  if (i == 0 && j == 0) return 0.0;
  const double si = sigma_rows[i], sj = sigma_cols[j];
  return -1.0 / (si * si + sj * sj);
}

ScalarField dct2(const ScalarField& d) {
  const Matrix cr = dct_matrix(d.rows()).matrix;
  const Matrix cc = dct_matrix(d.cols()).matrix;
  ScalarField out(d.grid());
  as_matrix(out).noalias() = cr * as_matrix(d) * cc.transpose();
  return out;
}

ScalarField idct2(const ScalarField& d) {
  const Matrix cr = dct_matrix(d.rows()).matrix;
  const Matrix cc = dct_matrix(d.cols()).matrix;
  ScalarField out(d.grid());
  as_matrix(out).noalias() = cr.transpose() * as_matrix(d) * cc;
  return out;
}

LaplacianPinv::LaplacianPinv(const GridSpec& grid)
    : grid_(grid),
      c_rows_(dct_matrix(grid.rows).matrix),
      c_cols_(dct_matrix(grid.cols).matrix),
      inv_eig_(idx(grid.rows), idx(grid.cols)) {
  const SpectralDiag diag = SpectralDiag::for_grid(grid);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      inv_eig_(idx(i), idx(j)) = diag.inverse_eigenvalue(i, j);
    }
  }
}

ScalarField LaplacianPinv::apply(const ScalarField& d) const {
  if (!(d.grid() == grid_)) throw ShapeError("Laplacian pseudo-inverse grid mismatch");
  Matrix coeff = c_rows_ * as_matrix(d) * c_cols_.transpose();
  coeff.array() *= inv_eig_.array();
  ScalarField out(grid_);
  as_matrix(out).noalias() = c_rows_.transpose() * coeff * c_cols_;
  return out;
}

ScalarField laplacian_pinv(const ScalarField& d) { return LaplacianPinv(d.grid()).apply(d); }

LocalPinvPlan::LocalPinvPlan(const TilingTriple& tilings, double h)
    : tilings_(tilings), a_k_(tilings.a_k()), b_m_(tilings.b_m()), h_(h) {
  tilings_.validate();
  const Tiling& at = tilings_.atilde;
  const DctPlan c2 = dct_matrix(at.parent_rows);
  const DctPlan c1 = dct_matrix(at.parent_cols);
  const SpectralDiag diag = SpectralDiag::for_grid({at.parent_rows, at.parent_cols, h});

  for (const Interval& l2 : at.rows) {
    fwd_rows_.push_back(dct_block(c2, l2, a_k_.rows));
    bwd_rows_.push_back(dct_block(c2, l2, b_m_.rows));
  }
  for (const Interval& l1 : at.cols) {
    fwd_cols_.push_back(dct_block(c1, l1, a_k_.cols));
    bwd_cols_.push_back(dct_block(c1, l1, b_m_.cols));
  }
  for (const Interval& l2 : at.rows) {
    for (const Interval& l1 : at.cols) {
      Matrix e(idx(l2.size()), idx(l1.size()));
      for (std::size_t i = 0; i < l2.size(); ++i) {
        for (std::size_t j = 0; j < l1.size(); ++j) {
          e(idx(i), idx(j)) = diag.inverse_eigenvalue(l2.begin + i, l1.begin + j);
        }
      }
      const std::size_t tile = l2.size() * l1.size();
      // d_k + two intermediate products + diagonal + partial result
      const std::size_t work = a_k_.size() + l2.size() * a_k_.cols.size() + 2 * tile +
                               l2.size() * b_m_.cols.size() + b_m_.size();
      peak_doubles_ = std::max(peak_doubles_, work);
      inv_eig_.push_back(std::move(e));
    }
  }
}

Matrix LocalPinvPlan::summand_from_rows(const Matrix& rows_part, std::size_t l2,
                                        std::size_t l1) const {
  const std::size_t lambda = l2 * tilings_.atilde.cols.size() + l1;
  Matrix coeff = rows_part * fwd_cols_[l1].transpose();
  coeff.array() *= inv_eig_[lambda].array();
  return bwd_rows_[l2].transpose() * coeff * bwd_cols_[l1];
}

Matrix LocalPinvPlan::summand(const Matrix& d_k, std::size_t l2, std::size_t l1) const {
  const Matrix rows_part = fwd_rows_[l2] * d_k;
  return summand_from_rows(rows_part, l2, l1);
}

ScalarField LocalPinvPlan::apply(const ScalarField& d_k, Execution exec) const {
  if (d_k.rows() != a_k_.rows.size() || d_k.cols() != a_k_.cols.size()) {
    throw ShapeError("block input does not match A_k " + to_string(a_k_));
  }
  const Matrix dk = as_matrix(d_k);
  const std::size_t n2 = tilings_.atilde.rows.size();
  const std::size_t n1 = tilings_.atilde.cols.size();
  const std::size_t count = n2 * n1;

  ScalarField out(b_m_.grid(h_));
  MutMap acc = as_matrix(out);
  if (exec == Execution::Serial) {
    // row-major lambda order, one row product alive at a time
    for (std::size_t l2 = 0; l2 < n2; ++l2) {
      const Matrix rows_part = fwd_rows_[l2] * dk;
      for (std::size_t l1 = 0; l1 < n1; ++l1) acc += summand_from_rows(rows_part, l2, l1);
    }
    return out;
  }

  // the parallel path keeps every row product and summand until the reduction
  std::vector<Matrix> rows_part(n2);
  std::vector<Matrix> partial(count);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t l2 = 0; l2 < static_cast<std::ptrdiff_t>(n2); ++l2) {
      rows_part[static_cast<std::size_t>(l2)] = fwd_rows_[static_cast<std::size_t>(l2)] * dk;
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t lambda = 0; lambda < static_cast<std::ptrdiff_t>(count); ++lambda) {
      const auto l = static_cast<std::size_t>(lambda);
      partial[l] = summand_from_rows(rows_part[l / n1], l / n1, l % n1);
    }
  }
  for (const Matrix& p : partial) acc += p;
  return out;
}

ScalarField laplacian_pinv_block(const ScalarField& d_k, const TilingTriple& tilings,
                                 Execution exec) {
  return LocalPinvPlan(tilings, d_k.h()).apply(d_k, exec);
}

}  // namespace tvs
