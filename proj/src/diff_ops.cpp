#include "tvstokes/diff_ops.hpp"

namespace tvs {
namespace kernels {
namespace {

// D+ along a strided line of n samples.
inline void forward_line(const double* d, double* out, std::size_t n, std::size_t stride,
                         double inv_h) {
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out[k * stride] = (d[(k + 1) * stride] - d[k * stride]) * inv_h;
  }
  out[(n - 1) * stride] = 0.0;
}

// D- along a strided line, accumulated into out when `accumulate` is set.
inline void backward_line(const double* d, double* out, std::size_t n, std::size_t stride,
                          double inv_h, bool accumulate) {
  auto put = [&](std::size_t k, double v) {
    if (accumulate) {
      out[k * stride] += v;
    } else {
      out[k * stride] = v;
    }
  };
  if (n == 1) {
    put(0, 0.0);
    return;
  }
  put(0, d[0] * inv_h);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    put(k, (d[k * stride] - d[(k - 1) * stride]) * inv_h);
  }
  put(n - 1, -d[(n - 2) * stride] * inv_h);
}

}  // namespace

void grad(std::span<const double> d, std::size_t rows, std::size_t cols, double h,
          std::span<double> gx, std::span<double> gy) {
  const double inv_h = 1.0 / h;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = d.data() + i * cols;
    double* ox = gx.data() + i * cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) ox[j] = (row[j + 1] - row[j]) * inv_h;
    ox[cols - 1] = 0.0;
  }
  for (std::size_t i = 0; i + 1 < rows; ++i) {
    const double* row = d.data() + i * cols;
    const double* next = row + cols;
    double* oy = gy.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) oy[j] = (next[j] - row[j]) * inv_h;
  }
  std::fill_n(gy.data() + (rows - 1) * cols, cols, 0.0);
}

void div(std::span<const double> vx, std::span<const double> vy, std::size_t rows,
         std::size_t cols, double h, std::span<double> out) {
  const double inv_h = 1.0 / h;
  // x part
  for (std::size_t i = 0; i < rows; ++i) {
    backward_line(vx.data() + i * cols, out.data() + i * cols, cols, 1, inv_h, false);
  }
  // y part, row by row so the inner loop stays contiguous
  if (rows == 1) return;
  for (std::size_t j = 0; j < cols; ++j) out[j] += vy[j] * inv_h;
  for (std::size_t i = 1; i + 1 < rows; ++i) {
    const double* cur = vy.data() + i * cols;
    const double* prev = cur - cols;
    double* o = out.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) o[j] += (cur[j] - prev[j]) * inv_h;
  }
  {
    const double* prev = vy.data() + (rows - 2) * cols;
    double* o = out.data() + (rows - 1) * cols;
    for (std::size_t j = 0; j < cols; ++j) o[j] -= prev[j] * inv_h;
  }
}

}  // namespace kernels

ScalarField forward_diff(const ScalarField& d, Axis axis) {
  ScalarField out(d.grid());
  const double inv_h = 1.0 / d.h();
  const std::size_t rows = d.rows(), cols = d.cols();
  const double* src = d.values().data();
  double* dst = out.values().data();
  if (axis == Axis::X) {
    for (std::size_t i = 0; i < rows; ++i) {
      kernels::forward_line(src + i * cols, dst + i * cols, cols, 1, inv_h);
    }
  } else {
    for (std::size_t j = 0; j < cols; ++j) {
      kernels::forward_line(src + j, dst + j, rows, cols, inv_h);
    }
  }
  return out;
}

ScalarField backward_diff(const ScalarField& d, Axis axis) {
  ScalarField out(d.grid());
  const double inv_h = 1.0 / d.h();
  const std::size_t rows = d.rows(), cols = d.cols();
  const double* src = d.values().data();
  double* dst = out.values().data();
  if (axis == Axis::X) {
    for (std::size_t i = 0; i < rows; ++i) {
      kernels::backward_line(src + i * cols, dst + i * cols, cols, 1, inv_h, false);
    }
  } else {
    for (std::size_t j = 0; j < cols; ++j) {
      kernels::backward_line(src + j, dst + j, rows, cols, inv_h, false);
    }
  }
  return out;
}

ScalarField neumann_backward_diff(const ScalarField& d, Axis axis) {
  const std::size_t n2 = d.rows(), n1 = d.cols();
  const double inv_h = 1.0 / d.h();
  ScalarField out(d.grid().extended());
  if (axis == Axis::X) {
    // columns 0 and n1 stay zero
    for (std::size_t i = 0; i <= n2; ++i) {
      const std::size_t src_row = (i == n2) ? n2 - 1 : i;  // mirrored extra row
      for (std::size_t j = 1; j < n1; ++j) {
        out(i, j) = (d(src_row, j) - d(src_row, j - 1)) * inv_h;
      }
    }
  } else {
    // rows 0 and n2 stay zero
    for (std::size_t i = 1; i < n2; ++i) {
      for (std::size_t j = 0; j <= n1; ++j) {
        const std::size_t src_col = (j == n1) ? n1 - 1 : j;  // mirrored extra column
        out(i, j) = (d(i, src_col) - d(i - 1, src_col)) * inv_h;
      }
    }
  }
  return out;
}

VectorField2 grad(const ScalarField& d) {
  VectorField2 out(d.grid());
  kernels::grad(d.values(), d.rows(), d.cols(), d.h(), out.plane(0), out.plane(1));
  return out;
}

ScalarField div(const VectorField2& v) {
  ScalarField out(v.grid());
  kernels::div(v.plane(0), v.plane(1), v.rows(), v.cols(), v.h(), out.values());
  return out;
}

TensorField2x2 multi_grad(const VectorField2& v) {
  TensorField2x2 out(v.grid());
  for (std::size_t k = 0; k < 2; ++k) {
    kernels::grad(v.plane(k), v.rows(), v.cols(), v.h(), out.plane(2 * k),
                  out.plane(2 * k + 1));
  }
  return out;
}

VectorField2 multi_div(const TensorField2x2& p) {
  VectorField2 out(p.grid());
  for (std::size_t k = 0; k < 2; ++k) {
    kernels::div(p.plane(2 * k), p.plane(2 * k + 1), p.rows(), p.cols(), p.h(),
                 out.plane(k));
  }
  return out;
}

ScalarField laplacian(const ScalarField& d) { return div(grad(d)); }

VectorField2 tangent_field(const ScalarField& d0) {
  ScalarField tx = neumann_backward_diff(d0, Axis::Y);
  tx *= -1.0;
  return make_vector(tx, neumann_backward_diff(d0, Axis::X));
}

}  // namespace tvs
