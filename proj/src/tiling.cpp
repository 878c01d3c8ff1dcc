#include "tvstokes/tiling.hpp"

#include <algorithm>
#include <limits>

namespace tvs {
namespace {

void validate_partition(const std::vector<Interval>& parts, std::size_t n, const char* axis) {
  if (parts.empty()) throw TilingError(std::string("empty ") + axis + " partition");
  std::size_t next = 0;
  for (const Interval& p : parts) {
    if (p.begin != next || p.empty()) {
      throw TilingError(std::string(axis) + " partition is not an ordered disjoint cover");
    }
    next = p.end;
  }
  if (next != n) throw TilingError(std::string(axis) + " partition does not cover the grid");
}

}  // namespace

std::vector<Interval> split_evenly(std::size_t begin, std::size_t end, std::size_t parts) {
  std::vector<Interval> out;
  if (end <= begin || parts == 0) return out;
  const std::size_t n = end - begin;
  parts = std::min(parts, n);
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  std::size_t pos = begin;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out.push_back({pos, pos + len});
    pos += len;
  }
  return out;
}

void Tiling::validate() const {
  validate_partition(rows, parent_rows, "row");
  validate_partition(cols, parent_cols, "column");
}

double Tiling::area_spread() const {
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  for (const Interval& r : rows) {
    for (const Interval& c : cols) {
      lo = std::min(lo, r.size() * c.size());
      hi = std::max(hi, r.size() * c.size());
    }
  }
  return static_cast<double>(hi) / static_cast<double>(lo);
}

Tiling Tiling::uniform(std::size_t parent_rows, std::size_t parent_cols, std::size_t m2,
                       std::size_t m1) {
  return {split_evenly(0, parent_rows, m2), split_evenly(0, parent_cols, m1), parent_rows,
          parent_cols};
}

void TilingTriple::validate() const {
  a.validate();
  atilde.validate();
  b.validate();
  if (a.parent_rows != atilde.parent_rows || a.parent_rows != b.parent_rows ||
      a.parent_cols != atilde.parent_cols || a.parent_cols != b.parent_cols) {
    throw TilingError("tilings live on different grids");
  }
  if (k[0] >= a.rows.size() || k[1] >= a.cols.size() || m[0] >= b.rows.size() ||
      m[1] >= b.cols.size()) {
    throw TilingError("distinguished tile index out of range");
  }
  const SubdomainRect ak = a_k();
  const SubdomainRect bm = b_m();
  SubdomainRect ak_minus, bm_minus;
  try {
    ak_minus = rect_minus(ak);
    bm_minus = rect_minus(bm);
  } catch (const DegenerateRectError& e) {
    throw TilingError(std::string("distinguished tile too thin: ") + e.what());
  }
  if (!ak_minus.contains(source)) {
    throw TilingError("source " + to_string(source) + " not inside shrunk A_k " +
                      to_string(ak_minus));
  }
  if (!bm_minus.contains(target)) {
    throw TilingError("target " + to_string(target) + " not inside shrunk B_m " +
                      to_string(bm_minus));
  }
}

bool TilingTriple::exact_halo() const {
  return rect_minus(a_k()) == source && rect_minus(b_m()) == target;
}

TilingTriple TilingTriple::trivial(const GridSpec& grid, const SubdomainRect& source,
                                   const SubdomainRect& target) {
  const Tiling one = Tiling::uniform(grid.rows, grid.cols, 1, 1);
  TilingTriple t{one, one, one, {0, 0}, {0, 0}, source, target};
  t.validate();
  return t;
}

}  // namespace tvs
