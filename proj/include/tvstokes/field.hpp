#pragma once

// Discrete function spaces on rectangular pixel grids.
//
// Index convention: all accessors are 0-based, (row, column) = (i, j) with
// i along y (rows, N2 of them) and j along x (columns, N1 of them).
// Documentation of the stripe algebra below quotes 1-based bounds where that
// reads more naturally; the code never uses them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tvstokes/errors.hpp"

namespace tvs {

// Pixel grid with `rows` x `cols` points and mesh width `h`.
struct GridSpec {
  std::size_t rows = 1;  // N2
  std::size_t cols = 1;  // N1
  double h = 1.0;

  std::size_t size() const noexcept { return rows * cols; }

  // The dual grid with one extra row and column.
  GridSpec extended() const noexcept { return {rows + 1, cols + 1, h}; }

  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

std::string to_string(const GridSpec& g);

// Half-open index range [begin, end).
struct Interval {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return end <= begin; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
  bool contains(const Interval& o) const noexcept {
    return o.begin >= begin && o.end <= end;
  }
  bool operator==(const Interval&) const = default;
};

Interval intersect(const Interval& a, const Interval& b) noexcept;

// Rectangle of grid points inside a parent grid of `parent_rows` x
// `parent_cols` points.
struct SubdomainRect {
  Interval rows;
  Interval cols;
  std::size_t parent_rows = 0;
  std::size_t parent_cols = 0;

  // Builds a rectangle from 1-based inclusive bounds i1..i2, j1..j2.
  static SubdomainRect from_one_based(std::size_t i1, std::size_t i2,
                                      std::size_t j1, std::size_t j2,
                                      std::size_t parent_rows,
                                      std::size_t parent_cols);
  // The rectangle covering the whole parent.
  static SubdomainRect full(const GridSpec& parent);

  std::size_t size() const noexcept { return rows.size() * cols.size(); }
  GridSpec grid(double h) const noexcept { return {rows.size(), cols.size(), h}; }
  bool contains(const SubdomainRect& o) const noexcept {
    return rows.contains(o.rows) && cols.contains(o.cols);
  }
  bool touches_bottom() const noexcept { return rows.end == parent_rows; }
  bool touches_right() const noexcept { return cols.end == parent_cols; }

  void validate() const;

  bool operator==(const SubdomainRect&) const = default;
};

std::string to_string(const SubdomainRect& r);

// Grows `r` by the row below it (unless it touches the bottom edge) and the
// column to its right (unless it touches the right edge).
SubdomainRect rect_plus(const SubdomainRect& r);

// Removes the last row of `r` (unless it touches the bottom edge) and its
// last column (unless it touches the right edge). Throws DegenerateRectError
// if that would leave no points.
SubdomainRect rect_minus(const SubdomainRect& r);

// Dense real-valued field with `C` planes on a grid. Planes are stored
// contiguously, each row-major.
//
// C = 1: scalar image. C = 2: vector field (x, y). C = 4: 2x2 tensor field
// stored as (row1.x, row1.y, row2.x, row2.y).
template <std::size_t C>
class Field {
 public:
  static constexpr std::size_t kChannels = C;

  Field() = default;

  explicit Field(const GridSpec& grid) : grid_(grid), data_(C * grid.size(), 0.0) {
    grid_.validate();
  }

  Field(const GridSpec& grid, std::vector<double> data)
      : grid_(grid), data_(std::move(data)) {
    grid_.validate();
    if (data_.size() != C * grid_.size()) {
      throw ShapeError("field data has " + std::to_string(data_.size()) +
                       " values, grid " + to_string(grid_) + " needs " +
                       std::to_string(C * grid_.size()));
    }
  }

  static Field constant(const GridSpec& grid, double value) {
    Field f(grid);
    std::fill(f.data_.begin(), f.data_.end(), value);
    return f;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t rows() const noexcept { return grid_.rows; }
  std::size_t cols() const noexcept { return grid_.cols; }
  double h() const noexcept { return grid_.h; }
  std::size_t plane_size() const noexcept { return grid_.size(); }

  double& operator()(std::size_t c, std::size_t i, std::size_t j) noexcept {
    return data_[c * grid_.size() + i * grid_.cols + j];
  }
  double operator()(std::size_t c, std::size_t i, std::size_t j) const noexcept {
    return data_[c * grid_.size() + i * grid_.cols + j];
  }

  // Scalar shorthand.
  double& operator()(std::size_t i, std::size_t j) noexcept
    requires(C == 1)
  {
    return data_[i * grid_.cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept
    requires(C == 1)
  {
    return data_[i * grid_.cols + j];
  }

  std::span<double> plane(std::size_t c) noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<const double> plane(std::size_t c) const noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Field& operator+=(const Field& o) {
    check_same_grid(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same_grid(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Field& operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
  }

  // this += s * o
  Field& axpy(double s, const Field& o) {
    check_same_grid(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  void check_same_grid(const Field& o) const {
    if (!(o.grid_ == grid_)) {
      throw ShapeError("grid mismatch: " + to_string(grid_) + " vs " +
                       to_string(o.grid_));
    }
  }

  bool operator==(const Field&) const = default;

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

using ScalarField = Field<1>;
using VectorField2 = Field<2>;
using TensorField2x2 = Field<4>;

// h-weighted inner product h^2 * sum u.v over all planes.
template <std::size_t C>
double inner_product(const Field<C>& u, const Field<C>& v) {
  u.check_same_grid(v);
  const auto a = u.values();
  const auto b = v.values();
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return u.h() * u.h() * s;
}

template <std::size_t C>
double squared_norm(const Field<C>& u) {
  return inner_product(u, u);
}

template <std::size_t C>
double norm(const Field<C>& u) {
  return std::sqrt(squared_norm(u));
}

// Largest absolute entry.
template <std::size_t C>
double max_abs(const Field<C>& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

// Copies `src` (living on `src_rect`) into a new field living on
// `dst_rect`; points of `dst_rect` outside `src_rect` are zero. Both
// rectangles are expressed in the same parent coordinates.
template <std::size_t C>
Field<C> transfer(const Field<C>& src, const SubdomainRect& src_rect,
                  const SubdomainRect& dst_rect) {
  if (src.rows() != src_rect.rows.size() || src.cols() != src_rect.cols.size()) {
    throw ShapeError("field " + to_string(src.grid()) + " does not match rect " +
                     to_string(src_rect));
  }
  Field<C> out(dst_rect.grid(src.h()));
  const Interval ri = intersect(src_rect.rows, dst_rect.rows);
  const Interval ci = intersect(src_rect.cols, dst_rect.cols);
  if (ri.empty() || ci.empty()) return out;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = ri.begin; i < ri.end; ++i) {
      const double* s = src.plane(c).data() + (i - src_rect.rows.begin) * src.cols() +
                        (ci.begin - src_rect.cols.begin);
      double* d = out.plane(c).data() + (i - dst_rect.rows.begin) * out.cols() +
                  (ci.begin - dst_rect.cols.begin);
      std::copy(s, s + ci.size(), d);
    }
  }
  return out;
}

// R_r: values of `u` on `r`.
template <std::size_t C>
Field<C> restrict(const Field<C>& u, const SubdomainRect& r) {
  r.validate();
  if (r.parent_rows != u.rows() || r.parent_cols != u.cols()) {
    throw ShapeError("rect " + to_string(r) + " is not inside grid " +
                     to_string(u.grid()));
  }
  return transfer(u, SubdomainRect::full(u.grid()), r);
}

// E_r: `u` on `r`, zero on the rest of the parent grid.
template <std::size_t C>
Field<C> extend(const Field<C>& u, const SubdomainRect& r) {
  r.validate();
  const GridSpec parent{r.parent_rows, r.parent_cols, u.h()};
  return transfer(u, r, SubdomainRect::full(parent));
}

// Pointwise product of every plane with a scalar weight.
template <std::size_t C>
Field<C> multiply_pointwise(Field<C> u, const ScalarField& w) {
  if (!(u.grid() == w.grid())) throw ShapeError("weight grid mismatch");
  const auto wv = w.values();
  for (std::size_t c = 0; c < C; ++c) {
    auto p = u.plane(c);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] *= wv[k];
  }
  return u;
}

ScalarField component(const VectorField2& v, std::size_t c);
VectorField2 make_vector(const ScalarField& x, const ScalarField& y);
// Row k (0 or 1) of a tensor field as a vector field.
VectorField2 tensor_row(const TensorField2x2& p, std::size_t k);
TensorField2x2 make_tensor(const VectorField2& row1, const VectorField2& row2);

}  // namespace tvs
