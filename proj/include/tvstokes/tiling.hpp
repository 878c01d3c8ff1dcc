#pragma once

// Tensor-product tilings of a grid and the (A, A~, B) triples used to
// evaluate R_B (operator) E_A blockwise.

#include <array>
#include <vector>

#include "tvstokes/field.hpp"

namespace tvs {

// Partition of a grid into rows.size() x cols.size() rectangles
// rows[a] x cols[b]. `rows` must be an ordered disjoint cover of
// [0, parent_rows), likewise `cols`.
struct Tiling {
  std::vector<Interval> rows;
  std::vector<Interval> cols;
  std::size_t parent_rows = 0;
  std::size_t parent_cols = 0;

  std::size_t count() const noexcept { return rows.size() * cols.size(); }
  SubdomainRect tile(std::size_t r, std::size_t c) const {
    return {rows.at(r), cols.at(c), parent_rows, parent_cols};
  }
  // Throws TilingError unless both partitions are ordered, non-empty and
  // cover their axis.
  void validate() const;
  // Largest over smallest tile area.
  double area_spread() const;

  // Near-uniform tiling with `m2` x `m1` tiles (fewer along an axis that is
  // shorter than the requested count).
  static Tiling uniform(std::size_t parent_rows, std::size_t parent_cols, std::size_t m2,
                        std::size_t m1);
};

// Splits [begin, end) into `parts` near-equal consecutive intervals (fewer if
// the range is shorter than `parts`). Earlier parts get the remainder.
std::vector<Interval> split_evenly(std::size_t begin, std::size_t end, std::size_t parts);

// Three tilings with one distinguished source tile A_k and target tile B_m.
//
// `source` is the support of the input (the grown subdomain of index k) and
// `target` the region where the output is wanted (grown subdomain m). The
// halo condition is source ⊆ rect_minus(A_k) and target ⊆ rect_minus(B_m);
// it makes the divergence of source-supported data live inside A_k and the
// gradient on target computable from B_m alone.
struct TilingTriple {
  Tiling a;
  Tiling atilde;
  Tiling b;
  std::array<std::size_t, 2> k{0, 0};  // (row index, col index) into a
  std::array<std::size_t, 2> m{0, 0};  // (row index, col index) into b
  SubdomainRect source;
  SubdomainRect target;

  SubdomainRect a_k() const { return a.tile(k[0], k[1]); }
  SubdomainRect b_m() const { return b.tile(m[0], m[1]); }

  // Throws TilingError if a tiling is not a disjoint cover or the halo
  // condition fails.
  void validate() const;

  // True when rect_minus(A_k) == source and rect_minus(B_m) == target
  // exactly (not merely containing them).
  bool exact_halo() const;

  // Tilings with a single tile each; valid for any source/target.
  static TilingTriple trivial(const GridSpec& grid, const SubdomainRect& source,
                              const SubdomainRect& target);
};

}  // namespace tvs
