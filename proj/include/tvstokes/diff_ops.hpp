#pragma once

// Finite-difference operators on a rectangular grid. Every operator acts on
// the grid its argument lives on (the primal image grid or the extended dual
// grid); the boundary conventions are those of that grid's size.
//
//   D+ : (d[j+1] - d[j]) / h, zero in the last column/row.
//   D- : d[0] / h in the first column/row, (d[j] - d[j-1]) / h inside and
//        -d[N-2] / h in the last one, so that D- = -(D+)^*.
//
// grad = (D+_x, D+_y), div = D-_x v_x + D-_y v_y, hence div = -grad^*.

#include <span>

#include "tvstokes/field.hpp"

namespace tvs {

enum class Axis { X, Y };

ScalarField forward_diff(const ScalarField& d, Axis axis);
ScalarField backward_diff(const ScalarField& d, Axis axis);

// Backward differences with Neumann boundary from the primal grid
// (N2 x N1) onto the extended grid (N2+1 x N1+1). The first and last
// column (X) or row (Y) are zero, and the extra row (X) or column (Y)
// repeats the differences of the last primal row or column.
ScalarField neumann_backward_diff(const ScalarField& d, Axis axis);

VectorField2 grad(const ScalarField& d);
ScalarField div(const VectorField2& v);

// Row-wise gradient: rows of the result are grad(v.x) and grad(v.y).
TensorField2x2 multi_grad(const VectorField2& v);
// Row-wise divergence: (div(row1), div(row2)).
VectorField2 multi_div(const TensorField2x2& p);

// div(grad(d)), the five-point Neumann Laplacian.
ScalarField laplacian(const ScalarField& d);

// Image tangent field on the extended grid:
// (-neumann_backward_diff(d0, Y), neumann_backward_diff(d0, X)).
VectorField2 tangent_field(const ScalarField& d0);

namespace kernels {

// Raw plane kernels used by the iterative solvers to avoid temporaries.
// All planes are row-major with `rows` x `cols` entries.

void grad(std::span<const double> d, std::size_t rows, std::size_t cols, double h,
          std::span<double> gx, std::span<double> gy);

void div(std::span<const double> vx, std::span<const double> vy, std::size_t rows,
         std::size_t cols, double h, std::span<double> out);

}  // namespace kernels

}  // namespace tvs
