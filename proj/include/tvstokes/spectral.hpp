#pragma once

// Orthonormal DCT-II matrices and the Moore-Penrose inverse of the Neumann
// Laplacian div(grad(.)), both on the full grid and as R_B (Lap^+) E_A
// evaluated tile by tile.

#include <vector>

#include <Eigen/Dense>

#include "tvstokes/field.hpp"
#include "tvstokes/parallel.hpp"
#include "tvstokes/tiling.hpp"

namespace tvs {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// C_N with entries sqrt(2/N) * cos(k (2j+1) pi / (2N)), first row scaled by
// 1/sqrt(2). Orthogonal: C C^T = I.
struct DctPlan {
  std::size_t n = 0;
  Matrix matrix;
};

// Throws ShapeError for n == 0.
DctPlan dct_matrix(std::size_t n);

// Submatrix of C_N: frequency rows `rows`, spatial columns `cols`.
Matrix dct_block(const DctPlan& plan, const Interval& rows, const Interval& cols);

// sigma_{N,k} = (2/h) sin(k pi / (2N)), k = 0..N-1. sigma_0 = 0.
std::vector<double> dct_sigma(std::size_t n, double h);

// Per-axis frequencies of the Laplacian on a grid.
struct SpectralDiag {
  std::vector<double> sigma_rows;  // length rows (y frequencies)
  std::vector<double> sigma_cols;  // length cols (x frequencies)
  double h = 1.0;

  static SpectralDiag for_grid(const GridSpec& grid);

  // Pseudo-inverse eigenvalue at frequency (i, j): 0 for (0, 0), else
  // -1 / (sigma_rows[i]^2 + sigma_cols[j]^2).
  double inverse_eigenvalue(std::size_t i, std::size_t j) const;
};

// C_rows d C_cols^T.
ScalarField dct2(const ScalarField& d);
// C_rows^T d C_cols.
ScalarField idct2(const ScalarField& d);

// Moore-Penrose inverse of the Neumann Laplacian on one grid. Immutable
// after construction; apply() is safe to call concurrently.
class LaplacianPinv {
 public:
  explicit LaplacianPinv(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  ScalarField apply(const ScalarField& d) const;

 private:
  GridSpec grid_;
  Matrix c_rows_;
  Matrix c_cols_;
  Matrix inv_eig_;
};

ScalarField laplacian_pinv(const ScalarField& d);

// Cached DCT blocks for evaluating R_{B_m} (Lap^+) E_{A_k} through the
// intermediate tiling A~ (one summand per A~ tile). Immutable once built.
class LocalPinvPlan {
 public:
  LocalPinvPlan(const TilingTriple& tilings, double h);

  const TilingTriple& tilings() const noexcept { return tilings_; }
  SubdomainRect a_k() const { return a_k_; }
  SubdomainRect b_m() const { return b_m_; }

  // d_k lives on A_k; result on B_m. Summands are reduced in row-major
  // tile order regardless of `exec`.
  ScalarField apply(const ScalarField& d_k, Execution exec = Execution::Serial) const;

  // One summand (tile lambda = (l2, l1)), on B_m.
  Matrix summand(const Matrix& d_k, std::size_t l2, std::size_t l1) const;

  // Largest number of doubles any single summand holds at once.
  std::size_t peak_summand_doubles() const noexcept { return peak_doubles_; }

 private:
  Matrix summand_from_rows(const Matrix& rows_part, std::size_t l2, std::size_t l1) const;

  TilingTriple tilings_;
  SubdomainRect a_k_;
  SubdomainRect b_m_;
  double h_;
  std::vector<Matrix> fwd_rows_;  // per lambda2: C2[Atilde rows, A_k rows]
  std::vector<Matrix> bwd_rows_;  // per lambda2: C2[Atilde rows, B_m rows]
  std::vector<Matrix> fwd_cols_;  // per lambda1: C1[Atilde cols, A_k cols]
  std::vector<Matrix> bwd_cols_;  // per lambda1: C1[Atilde cols, B_m cols]
  std::vector<Matrix> inv_eig_;   // per lambda (row-major): diagonal on Atilde tile
  std::size_t peak_doubles_ = 0;
};

// R_{B_m} (Lap^+) E_{A_k} d_k computed tile by tile.
ScalarField laplacian_pinv_block(const ScalarField& d_k, const TilingTriple& tilings,
                                 Execution exec = Execution::Serial);

}  // namespace tvs
