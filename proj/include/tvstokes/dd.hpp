#pragma once

// Overlapping domain decomposition for the dual problems.
//
// Outer loop (successive subspace correction with relaxation):
//   q_m = argmin_{|v| <= theta_m} D(v + sum_{l != m} theta_l p^n)   for every m
//   p^{n+1} = (1 - alpha_hat) p^n + alpha_hat sum_m q_m
//
// The local minimizations run a theta-weighted Chambolle iteration that
// touches only data near the subdomain: for TFS every inner step works on
// the grown subdomain and evaluates the projection blockwise; for IR it works
// on the subdomain plus a one pixel halo.

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tvstokes/dual_solvers.hpp"
#include "tvstokes/projection.hpp"

namespace tvs {

// M2 x M1 overlapping rectangles covering a grid, stored row-major.
struct DdLayout {
  GridSpec grid;
  std::size_t m2 = 1;
  std::size_t m1 = 1;
  std::size_t overlap_y = 0;
  std::size_t overlap_x = 0;
  std::vector<SubdomainRect> rects;

  std::size_t count() const noexcept { return rects.size(); }
  const SubdomainRect& rect(std::size_t m) const { return rects.at(m); }
  std::array<std::size_t, 2> index(std::size_t m) const noexcept { return {m / m1, m % m1}; }

  // Subdomain m grown by one stripe right and below.
  SubdomainRect grown(std::size_t m) const { return rect_plus(rects.at(m)); }

  // The same splitting on a smaller grid sharing the top-left corner
  // (the image grid inside the extended grid): rect intersected with it.
  DdLayout restricted_to(const GridSpec& inner) const;
};

// Near-uniform layout: along each axis the piece lengths add up to
// length + (m - 1) * overlap, the remainder going to the first pieces, and
// consecutive pieces share exactly `overlap` points. Throws LayoutError if a
// piece would be shorter than overlap + 2.
DdLayout build_layout(const GridSpec& grid, std::size_t m2, std::size_t m1,
                      std::size_t overlap_y, std::size_t overlap_x);

// theta_m on the layout grid, one field per subdomain.
struct PartitionOfUnity {
  std::vector<ScalarField> thetas;

  // Same weights on the smaller grid (see DdLayout::restricted_to).
  PartitionOfUnity restricted_to(const GridSpec& inner) const;
};

// Separable linear ramps over the overlap bands, normalized to sum to one.
PartitionOfUnity build_partition_of_unity(const DdLayout& layout);

// Relaxation weight from subdomain colouring: 1, 0.5 or 0.25.
double alpha_hat_for(std::size_t m1, std::size_t m2);

// (A, A~, B) tilings of the layout grid for evaluating
// R_{grown m} P E_{grown k}. A_k is the grown-twice subdomain k; the rest of
// each axis is cut into as many near-equal pieces as there are subdomains
// before and after k. B is built the same way around m, A~ is uniform M2 x M1.
TilingTriple build_tilings(const DdLayout& layout, std::size_t k, std::size_t m);

enum class InnerStart {
  Previous,  // the last local solution of the same subdomain
  Current    // theta_m p^n, the restriction of the current iterate
};

struct DdConfig {
  double alpha_hat = 0.25;
  std::size_t max_it = 5000;
  std::size_t max_inner_it = 10;
  double outer_tol = 1e-10;  // on |D_n^2 - D_{n+1}^2| / |grid|
  double t = 0.125;
  InnerStart start = InnerStart::Previous;
  Execution exec = Execution::Serial;

  void validate() const;
};

// Called after every energy evaluation with (n, D(p^n)); returning false
// stops the outer loop.
using DdObserver = std::function<bool(std::size_t, double)>;

// v <- (theta v + t theta psi) / (theta + t |psi|) per 2-vector; zero where
// theta and psi both vanish.
void weighted_update(std::span<double> vx, std::span<double> vy,
                     std::span<const double> psix, std::span<const double> psiy,
                     std::span<const double> theta, double t);

// ---------------------------------------------------------------- TFS

// min || P multi_div p - f ||^2 with f = P tau0 / delta on the extended grid.
struct TfsProblem {
  VectorField2 f;
};

TfsProblem make_tfs_problem(const VectorField2& tau0, double delta);

// Subdomain tasks for TFS. Holds the blockwise projection plans for every
// (k, m) pair; immutable after construction.
class TfsSubdomains {
 public:
  TfsSubdomains(const TfsProblem& problem, const DdLayout& layout, const PartitionOfUnity& pou);

  const DdLayout& layout() const noexcept { return layout_; }
  const LocalProjector& projector(std::size_t k, std::size_t m) const {
    return plans_.at(k * layout_.count() + m);
  }

  // multi_div of theta_l p on the grown subdomain l.
  VectorField2 weighted_divergence(std::size_t l, const TensorField2x2& p) const;

  // R_{grown m} (f - P multi_div sum_{l != m} theta_l p), from the
  // per-subdomain divergences (index l of `divs`) and blockwise projections.
  VectorField2 omega0(std::size_t m, const std::vector<VectorField2>& divs,
                      Execution exec = Execution::Serial) const;

  // Localized inner loop. `v` lives on subdomain m, `omega0` on grown m.
  // Optionally records every iterate.
  TensorField2x2 inner(std::size_t m, TensorField2x2 v, const VectorField2& omega0, double t,
                       std::size_t iterations,
                       std::vector<TensorField2x2>* history = nullptr) const;

  double energy(const TensorField2x2& p) const;

 private:
  TfsProblem problem_;
  DdLayout layout_;
  std::vector<ScalarField> theta_local_;  // theta_m on subdomain m
  std::vector<LocalProjector> plans_;     // row-major (k, m)
  Projector global_;                      // energy monitoring only
};

// Full-grid version of the TFS inner loop (no localization); `v` and the
// result live on the whole extended grid.
TensorField2x2 inner_tfs_global(std::size_t m, const TensorField2x2& p, TensorField2x2 v,
                                const TfsProblem& problem, const PartitionOfUnity& pou, double t,
                                std::size_t iterations,
                                std::vector<TensorField2x2>* history = nullptr);

DualSolution<TensorField2x2> dd_solve(const TfsProblem& problem, const DdLayout& layout,
                                      const PartitionOfUnity& pou, const DdConfig& cfg,
                                      const DdObserver& observer = {});

// ---------------------------------------------------------------- IR

// min || div p - f ||^2 on the image grid.
struct IrProblem {
  ScalarField f;
};

class IrSubdomains {
 public:
  IrSubdomains(const IrProblem& problem, const DdLayout& layout, const PartitionOfUnity& pou);

  const DdLayout& layout() const noexcept { return layout_; }
  // Subdomain m plus one pixel on every side that is not the grid edge.
  const SubdomainRect& halo(std::size_t m) const { return halos_.at(m); }

  // R_halo (sum_{l != m} theta_l p).
  VectorField2 others(std::size_t m, const VectorField2& p) const;

  // Inner loop on the halo. `v` lives on subdomain m.
  VectorField2 inner(std::size_t m, VectorField2 v, const VectorField2& others, double t,
                     std::size_t iterations, std::vector<VectorField2>* history = nullptr) const;

  double energy(const VectorField2& p) const;

 private:
  IrProblem problem_;
  DdLayout layout_;
  PartitionOfUnity pou_;
  std::vector<SubdomainRect> halos_;
  std::vector<ScalarField> theta_local_;
  std::vector<ScalarField> f_halo_;
};

VectorField2 inner_ir_global(std::size_t m, const VectorField2& p, VectorField2 v,
                             const IrProblem& problem, const PartitionOfUnity& pou, double t,
                             std::size_t iterations, std::vector<VectorField2>* history = nullptr);

DualSolution<VectorField2> dd_solve(const IrProblem& problem, const DdLayout& layout,
                                    const PartitionOfUnity& pou, const DdConfig& cfg,
                                    const DdObserver& observer = {});

// Per-outer-iteration CSV "n,energy,relative_gap"; the gap column is empty
// without a reference energy.
void write_dd_csv(std::ostream& os, const EnergyTrace& trace,
                  std::optional<double> reference = std::nullopt);

}  // namespace tvs
