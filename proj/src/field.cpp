#include "tvstokes/field.hpp"

#include <sstream>

namespace tvs {

void GridSpec::validate() const {
  if (rows < 1 || cols < 1) throw ShapeError("grid needs at least one row and column");
  if (!(h > 0.0) || !std::isfinite(h)) throw ShapeError("mesh width must be positive");
}

std::string to_string(const GridSpec& g) {
  std::ostringstream os;
  os << g.rows << "x" << g.cols << " (h=" << g.h << ")";
  return os.str();
}

Interval intersect(const Interval& a, const Interval& b) noexcept {
  const std::size_t lo = std::max(a.begin, b.begin);
  const std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? Interval{lo, hi} : Interval{lo, lo};
}

SubdomainRect SubdomainRect::from_one_based(std::size_t i1, std::size_t i2,
                                            std::size_t j1, std::size_t j2,
                                            std::size_t parent_rows,
                                            std::size_t parent_cols) {
  if (i1 < 1 || j1 < 1) throw ShapeError("1-based bounds start at 1");
  SubdomainRect r{{i1 - 1, i2}, {j1 - 1, j2}, parent_rows, parent_cols};
  r.validate();
  return r;
}

SubdomainRect SubdomainRect::full(const GridSpec& parent) {
  return {{0, parent.rows}, {0, parent.cols}, parent.rows, parent.cols};
}

void SubdomainRect::validate() const {
  if (rows.empty() || cols.empty() || rows.end > parent_rows || cols.end > parent_cols) {
    throw ShapeError("invalid rect " + to_string(*this));
  }
}

std::string to_string(const SubdomainRect& r) {
  std::ostringstream os;
  os << "rows[" << r.rows.begin << "," << r.rows.end << ") cols[" << r.cols.begin
     << "," << r.cols.end << ") in " << r.parent_rows << "x" << r.parent_cols;
  return os.str();
}

SubdomainRect rect_plus(const SubdomainRect& r) {
  r.validate();
  SubdomainRect out = r;
  if (!r.touches_bottom()) ++out.rows.end;
  if (!r.touches_right()) ++out.cols.end;
  return out;
}

SubdomainRect rect_minus(const SubdomainRect& r) {
  r.validate();
  SubdomainRect out = r;
  if (!r.touches_bottom()) --out.rows.end;
  if (!r.touches_right()) --out.cols.end;
  if (out.rows.empty() || out.cols.empty()) {
    throw DegenerateRectError("removing the trailing stripes empties " + to_string(r));
  }
  return out;
}

ScalarField component(const VectorField2& v, std::size_t c) {
  ScalarField out(v.grid());
  const auto src = v.plane(c);
  std::copy(src.begin(), src.end(), out.values().begin());
  return out;
}

VectorField2 make_vector(const ScalarField& x, const ScalarField& y) {
  x.check_same_grid(y);
  VectorField2 out(x.grid());
  std::copy(x.values().begin(), x.values().end(), out.plane(0).begin());
  std::copy(y.values().begin(), y.values().end(), out.plane(1).begin());
  return out;
}

VectorField2 tensor_row(const TensorField2x2& p, std::size_t k) {
  VectorField2 out(p.grid());
  for (std::size_t c = 0; c < 2; ++c) {
    const auto src = p.plane(2 * k + c);
    std::copy(src.begin(), src.end(), out.plane(c).begin());
  }
  return out;
}

TensorField2x2 make_tensor(const VectorField2& row1, const VectorField2& row2) {
  row1.check_same_grid(row2);
  TensorField2x2 out(row1.grid());
  for (std::size_t c = 0; c < 2; ++c) {
    std::copy(row1.plane(c).begin(), row1.plane(c).end(), out.plane(c).begin());
    std::copy(row2.plane(c).begin(), row2.plane(c).end(), out.plane(2 + c).begin());
  }
  return out;
}

}  // namespace tvs
