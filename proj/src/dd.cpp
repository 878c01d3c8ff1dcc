#include "tvstokes/dd.hpp"

#include <cmath>
#include <ostream>

#include "tvstokes/diff_ops.hpp"

namespace tvs {
namespace {

std::vector<Interval> axis_pieces(std::size_t length, std::size_t m, std::size_t s,
                                  const char* axis) {
  if (m == 0) throw LayoutError(std::string("need at least one subdomain along ") + axis);
  if (m == 1) return {{0, length}};
  if (s < 2) throw LayoutError(std::string("overlap along ") + axis + " must be at least 2");
  const std::size_t total = length + (m - 1) * s;
  const std::size_t base = total / m;
  const std::size_t extra = total % m;
  std::vector<Interval> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    if (len < s + 2) {
      throw LayoutError(std::string("subdomains along ") + axis + " would have " +
                        std::to_string(len) + " points, need overlap + 2 = " +
                        std::to_string(s + 2));
    }
    out.push_back({start, start + len});
    start += len - s;
  }
  return out;
}

// weight of piece i at each position of the axis
std::vector<double> axis_ramp(const std::vector<Interval>& pieces, std::size_t i,
                              std::size_t length) {
  std::vector<double> w(length, 0.0);
  const Interval p = pieces[i];
  for (std::size_t x = p.begin; x < p.end; ++x) {
    double v = 1.0;
    if (i > 0 && x < pieces[i - 1].end) {
      const double s = static_cast<double>(pieces[i - 1].end - p.begin);
      v = std::min(v, static_cast<double>(x - p.begin + 1) / (s + 1.0));
    }
    if (i + 1 < pieces.size() && x >= pieces[i + 1].begin) {
      const double s = static_cast<double>(p.end - pieces[i + 1].begin);
      v = std::min(v, (s - static_cast<double>(x - pieces[i + 1].begin)) / (s + 1.0));
    }
    w[x] = v;
  }
  return w;
}

// the other subdomains' pieces around `a`, `before` and `after` of them
std::vector<Interval> cut_around(const Interval& a, std::size_t n, std::size_t before,
                                 std::size_t after, std::size_t& index) {
  std::vector<Interval> out;
  if (a.begin > 0) out = split_evenly(0, a.begin, std::max<std::size_t>(before, 1));
  index = out.size();
  out.push_back(a);
  if (a.end < n) {
    for (const Interval& p : split_evenly(a.end, n, std::max<std::size_t>(after, 1)))
      out.push_back(p);
  }
  return out;
}

Tiling tiling_around(const DdLayout& layout, std::size_t k, std::array<std::size_t, 2>& pos) {
  const auto [k2, k1] = layout.index(k);
  const SubdomainRect a = rect_plus(layout.grown(k));
  Tiling t;
  t.parent_rows = layout.grid.rows;
  t.parent_cols = layout.grid.cols;
  t.rows = cut_around(a.rows, layout.grid.rows, k2, layout.m2 - 1 - k2, pos[0]);
  t.cols = cut_around(a.cols, layout.grid.cols, k1, layout.m1 - 1 - k1, pos[1]);
  return t;
}

template <std::size_t C>
void check_grid(const Field<C>& f, const GridSpec& g, const char* what) {
  if (!(f.grid() == g)) {
    throw ShapeError(std::string(what) + " lives on " + to_string(f.grid()) + ", expected " +
                     to_string(g));
  }
}

void check_pou(const PartitionOfUnity& pou, const DdLayout& layout) {
  if (pou.thetas.size() != layout.count()) throw LayoutError("one weight per subdomain needed");
  for (const ScalarField& t : pou.thetas) check_grid(t, layout.grid, "partition of unity");
}

// multi_div of a field supported on `rect`, evaluated on rect_plus(rect)
VectorField2 local_multi_div(const TensorField2x2& v, const SubdomainRect& rect) {
  return multi_div(transfer(v, rect, rect_plus(rect)));
}

// div on a halo rectangle whose last row/column may lie inside the grid: the
// subgrid stencil there assumes a zero neighbour outside, add the missing term
ScalarField halo_div(const VectorField2& w, const SubdomainRect& halo) {
  ScalarField r = div(w);
  const double h = w.h();
  if (!halo.touches_right()) {
    const std::size_t j = w.cols() - 1;
    for (std::size_t i = 0; i < w.rows(); ++i) r(i, j) += w(0, i, j) / h;
  }
  if (!halo.touches_bottom()) {
    const std::size_t i = w.rows() - 1;
    for (std::size_t j = 0; j < w.cols(); ++j) r(i, j) += w(1, i, j) / h;
  }
  return r;
}

SubdomainRect with_halo(const SubdomainRect& r) {
  SubdomainRect out = r;
  if (out.rows.begin > 0) --out.rows.begin;
  if (out.cols.begin > 0) --out.cols.begin;
  out = rect_plus(out);
  return out;
}

double outer_delta(double previous, double current, std::size_t points) {
  return std::abs(previous * previous - current * current) / static_cast<double>(points);
}

void check_energy(double e, std::size_t n) {
  if (!std::isfinite(e)) {
    throw NumericalDivergenceError("dual energy became non-finite at outer iteration " +
                                   std::to_string(n));
  }
}

// shared skeleton of both outer loops
template <typename P, typename Energy, typename Sweep>
DualSolution<P> outer_loop(const DdLayout& layout, const DdConfig& cfg, const DdObserver& observer,
                           Energy&& energy, Sweep&& sweep) {
  const GridSpec grid = layout.grid;
  DualSolution<P> sol{P(grid), {}, 0, false};
  std::vector<P> previous(layout.count());
  for (std::size_t m = 0; m < layout.count(); ++m) previous[m] = P(layout.rect(m).grid(grid.h));

  for (std::size_t n = 0;; ++n) {
    const double e = energy(sol.p);
    check_energy(e, n);
    sol.trace.values.push_back(e);
    if (observer && !observer(n, e)) break;
    if (n > 0 && outer_delta(sol.trace.values[n - 1], e, grid.size()) < cfg.outer_tol) {
      sol.converged = true;
      break;
    }
    if (n == cfg.max_it) break;

    std::vector<P> q = sweep(sol.p, previous);
    P sum(grid);
    for (std::size_t m = 0; m < layout.count(); ++m) sum += extend(q[m], layout.rect(m));
    sol.p *= 1.0 - cfg.alpha_hat;
    sol.p.axpy(cfg.alpha_hat, sum);
    previous = std::move(q);
    ++sol.iterations;
  }
  return sol;
}

template <typename P>
P start_value(const DdConfig& cfg, const P& p, const P& previous, const SubdomainRect& rect,
              const ScalarField& theta_local) {
  if (cfg.start == InnerStart::Previous) return previous;
  return multiply_pointwise(restrict(p, rect), theta_local);
}

}  // namespace

DdLayout DdLayout::restricted_to(const GridSpec& inner) const {
  if (inner.rows > grid.rows || inner.cols > grid.cols) {
    throw LayoutError("restriction grid is larger than the layout grid");
  }
  DdLayout out = *this;
  out.grid = inner;
  for (SubdomainRect& r : out.rects) {
    r.rows = intersect(r.rows, {0, inner.rows});
    r.cols = intersect(r.cols, {0, inner.cols});
    r.parent_rows = inner.rows;
    r.parent_cols = inner.cols;
    if (r.rows.empty() || r.cols.empty()) throw LayoutError("subdomain vanishes on the smaller grid");
  }
  return out;
}

DdLayout build_layout(const GridSpec& grid, std::size_t m2, std::size_t m1,
                      std::size_t overlap_y, std::size_t overlap_x) {
  grid.validate();
  const auto rows = axis_pieces(grid.rows, m2, overlap_y, "y");
  const auto cols = axis_pieces(grid.cols, m1, overlap_x, "x");
  DdLayout layout{grid, m2, m1, overlap_y, overlap_x, {}};
  for (const Interval& r : rows)
    for (const Interval& c : cols) layout.rects.push_back({r, c, grid.rows, grid.cols});
  return layout;
}

PartitionOfUnity PartitionOfUnity::restricted_to(const GridSpec& inner) const {
  PartitionOfUnity out;
  for (const ScalarField& t : thetas) {
    const SubdomainRect r{{0, inner.rows}, {0, inner.cols}, t.rows(), t.cols()};
    ScalarField piece = restrict(t, r);
    out.thetas.emplace_back(inner, std::vector<double>(piece.values().begin(), piece.values().end()));
  }
  return out;
}

PartitionOfUnity build_partition_of_unity(const DdLayout& layout) {
  const GridSpec g = layout.grid;
  std::vector<Interval> rows, cols;
  for (std::size_t a = 0; a < layout.m2; ++a) rows.push_back(layout.rect(a * layout.m1).rows);
  for (std::size_t b = 0; b < layout.m1; ++b) cols.push_back(layout.rect(b).cols);

  PartitionOfUnity pou;
  ScalarField total(g);
  for (std::size_t m = 0; m < layout.count(); ++m) {
    const auto [a, b] = layout.index(m);
    const auto wy = axis_ramp(rows, a, g.rows);
    const auto wx = axis_ramp(cols, b, g.cols);
    ScalarField theta(g);
    for (std::size_t i = 0; i < g.rows; ++i)
      for (std::size_t j = 0; j < g.cols; ++j) theta(i, j) = wy[i] * wx[j];
    total += theta;
    pou.thetas.push_back(std::move(theta));
  }
  for (ScalarField& theta : pou.thetas) {
    for (std::size_t k = 0; k < g.size(); ++k) theta.values()[k] /= total.values()[k];
  }
  return pou;
}

double alpha_hat_for(std::size_t m1, std::size_t m2) {
  if (m1 == 0 || m2 == 0) throw LayoutError("subdomain counts must be positive");
  if (m1 == 1 && m2 == 1) return 1.0;
  if (m1 == 1 || m2 == 1) return 0.5;
  return 0.25;
}

TilingTriple build_tilings(const DdLayout& layout, std::size_t k, std::size_t m) {
  if (k >= layout.count() || m >= layout.count()) throw TilingError("subdomain index out of range");
  TilingTriple t;
  t.a = tiling_around(layout, k, t.k);
  t.b = tiling_around(layout, m, t.m);
  t.atilde = Tiling::uniform(layout.grid.rows, layout.grid.cols, layout.m2, layout.m1);
  t.source = layout.grown(k);
  t.target = layout.grown(m);
  t.validate();
  return t;
}

void DdConfig::validate() const {
  if (!(alpha_hat > 0.0) || alpha_hat > 1.0) throw ConfigError("alpha_hat must lie in (0, 1]");
  if (!(t > 0.0) || t > 0.125) throw ConfigError("step size t must lie in (0, 1/8]");
  if (!(outer_tol > 0.0)) throw ConfigError("outer tolerance must be positive");
  if (max_inner_it == 0) throw ConfigError("need at least one inner iteration");
}

void weighted_update(std::span<double> vx, std::span<double> vy, std::span<const double> psix,
                     std::span<const double> psiy, std::span<const double> theta, double t) {
  for (std::size_t k = 0; k < vx.size(); ++k) {
    const double th = theta[k];
    const double mag = std::sqrt(psix[k] * psix[k] + psiy[k] * psiy[k]);
    const double denom = th + t * mag;
    if (denom == 0.0) {
      vx[k] = 0.0;
      vy[k] = 0.0;
      continue;
    }
    vx[k] = (th * vx[k] + t * th * psix[k]) / denom;
    vy[k] = (th * vy[k] + t * th * psiy[k]) / denom;
  }
}

// ---------------------------------------------------------------- TFS

TfsProblem make_tfs_problem(const VectorField2& tau0, double delta) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  VectorField2 f = project_global(tau0);
  f *= 1.0 / delta;
  return {std::move(f)};
}

TfsSubdomains::TfsSubdomains(const TfsProblem& problem, const DdLayout& layout,
                             const PartitionOfUnity& pou)
    : problem_(problem), layout_(layout), global_(layout.grid) {
  check_grid(problem.f, layout.grid, "TFS data");
  check_pou(pou, layout);
  for (std::size_t m = 0; m < layout.count(); ++m) {
    theta_local_.push_back(restrict(pou.thetas[m], layout.rect(m)));
  }
  for (std::size_t k = 0; k < layout.count(); ++k) {
    for (std::size_t m = 0; m < layout.count(); ++m) {
      plans_.emplace_back(build_tilings(layout, k, m), layout.grid.h);
    }
  }
}

VectorField2 TfsSubdomains::weighted_divergence(std::size_t l, const TensorField2x2& p) const {
  const SubdomainRect& r = layout_.rect(l);
  return local_multi_div(multiply_pointwise(restrict(p, r), theta_local_[l]), r);
}

VectorField2 TfsSubdomains::omega0(std::size_t m, const std::vector<VectorField2>& divs,
                                   Execution exec) const {
  const std::size_t count = layout_.count();
  if (divs.size() != count) throw ShapeError("need one divergence per subdomain");
  std::vector<VectorField2> pieces(count);
  if (exec == Execution::Serial) {
    for (std::size_t l = 0; l < count; ++l)
      if (l != m) pieces[l] = projector(l, m).apply(divs[l]);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(count); ++li) {
      const auto l = static_cast<std::size_t>(li);
      if (l != m) pieces[l] = projector(l, m).apply(divs[l]);
    }
  }
  VectorField2 out = restrict(problem_.f, layout_.grown(m));
  for (std::size_t l = 0; l < count; ++l)
    if (l != m) out -= pieces[l];
  return out;
}

TensorField2x2 TfsSubdomains::inner(std::size_t m, TensorField2x2 v, const VectorField2& omega0,
                                    double t, std::size_t iterations,
                                    std::vector<TensorField2x2>* history) const {
  const SubdomainRect& rect = layout_.rect(m);
  const SubdomainRect grown = layout_.grown(m);
  check_grid(v, rect.grid(layout_.grid.h), "local dual variable");
  check_grid(omega0, grown.grid(layout_.grid.h), "local omega0");
  const LocalProjector& plan = projector(m, m);
  const ScalarField& theta = theta_local_[m];

  for (std::size_t it = 0; it < iterations; ++it) {
    VectorField2 z = plan.apply(local_multi_div(v, rect));
    z -= omega0;
    const TensorField2x2 psi = transfer(multi_grad(z), grown, rect);
    for (std::size_t k = 0; k < 2; ++k) {
      weighted_update(v.plane(2 * k), v.plane(2 * k + 1), psi.plane(2 * k),
                      psi.plane(2 * k + 1), theta.values(), t);
    }
    if (history) history->push_back(v);
  }
  return v;
}

double TfsSubdomains::energy(const TensorField2x2& p) const {
  return tfs_energy(p, problem_.f, 1.0, global_);
}

TensorField2x2 inner_tfs_global(std::size_t m, const TensorField2x2& p, TensorField2x2 v,
                                const TfsProblem& problem, const PartitionOfUnity& pou, double t,
                                std::size_t iterations, std::vector<TensorField2x2>* history) {
  const GridSpec grid = p.grid();
  TensorField2x2 others(grid);
  for (std::size_t l = 0; l < pou.thetas.size(); ++l)
    if (l != m) others += multiply_pointwise(p, pou.thetas[l]);
  const Projector proj(grid);
  VectorField2 omega0 = problem.f;
  omega0 -= proj.apply(multi_div(others));

  const ScalarField& theta = pou.thetas.at(m);
  for (std::size_t it = 0; it < iterations; ++it) {
    VectorField2 z = proj.apply(multi_div(v));
    z -= omega0;
    const TensorField2x2 psi = multi_grad(z);
    for (std::size_t k = 0; k < 2; ++k) {
      weighted_update(v.plane(2 * k), v.plane(2 * k + 1), psi.plane(2 * k),
                      psi.plane(2 * k + 1), theta.values(), t);
    }
    if (history) history->push_back(v);
  }
  return v;
}

DualSolution<TensorField2x2> dd_solve(const TfsProblem& problem, const DdLayout& layout,
                                      const PartitionOfUnity& pou, const DdConfig& cfg,
                                      const DdObserver& observer) {
  cfg.validate();
  const TfsSubdomains sub(problem, layout, pou);
  const std::size_t count = layout.count();
  const bool par = cfg.exec == Execution::Parallel;
  std::vector<ScalarField> theta_local;
  for (std::size_t m = 0; m < count; ++m) theta_local.push_back(restrict(pou.thetas[m], layout.rect(m)));

  auto sweep = [&](const TensorField2x2& p, const std::vector<TensorField2x2>& previous) {
    std::vector<VectorField2> divs(count);
    std::vector<TensorField2x2> q(count);
#pragma omp parallel if (par)
    {
#pragma omp for schedule(static)
      for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(count); ++li) {
        const auto l = static_cast<std::size_t>(li);
        divs[l] = sub.weighted_divergence(l, p);
      }
#pragma omp for schedule(dynamic)
      for (std::ptrdiff_t mi = 0; mi < static_cast<std::ptrdiff_t>(count); ++mi) {
        const auto m = static_cast<std::size_t>(mi);
        const VectorField2 w0 = sub.omega0(m, divs);
        q[m] = sub.inner(m, start_value(cfg, p, previous[m], layout.rect(m), theta_local[m]), w0,
                         cfg.t, cfg.max_inner_it);
      }
    }
    return q;
  };
  return outer_loop<TensorField2x2>(
      layout, cfg, observer, [&](const TensorField2x2& p) { return sub.energy(p); }, sweep);
}

// ---------------------------------------------------------------- IR

IrSubdomains::IrSubdomains(const IrProblem& problem, const DdLayout& layout,
                           const PartitionOfUnity& pou)
    : problem_(problem), layout_(layout), pou_(pou) {
  check_grid(problem.f, layout.grid, "IR data");
  check_pou(pou, layout);
  for (std::size_t m = 0; m < layout.count(); ++m) {
    halos_.push_back(with_halo(layout.rect(m)));
    theta_local_.push_back(restrict(pou.thetas[m], layout.rect(m)));
    f_halo_.push_back(restrict(problem.f, halos_.back()));
  }
}

VectorField2 IrSubdomains::others(std::size_t m, const VectorField2& p) const {
  const SubdomainRect& h = halos_.at(m);
  const VectorField2 ph = restrict(p, h);
  VectorField2 acc(h.grid(layout_.grid.h));
  for (std::size_t l = 0; l < layout_.count(); ++l)
    if (l != m) acc += multiply_pointwise(ph, restrict(pou_.thetas[l], h));
  return acc;
}

VectorField2 IrSubdomains::inner(std::size_t m, VectorField2 v, const VectorField2& others,
                                 double t, std::size_t iterations,
                                 std::vector<VectorField2>* history) const {
  const SubdomainRect& rect = layout_.rect(m);
  const SubdomainRect& halo = halos_.at(m);
  check_grid(v, rect.grid(layout_.grid.h), "local dual variable");
  check_grid(others, halo.grid(layout_.grid.h), "halo data");
  const ScalarField& theta = theta_local_[m];

  for (std::size_t it = 0; it < iterations; ++it) {
    VectorField2 w = transfer(v, rect, halo);
    w += others;
    ScalarField r = halo_div(w, halo);
    r -= f_halo_[m];
    const VectorField2 psi = transfer(grad(r), halo, rect);
    weighted_update(v.plane(0), v.plane(1), psi.plane(0), psi.plane(1), theta.values(), t);
    if (history) history->push_back(v);
  }
  return v;
}

double IrSubdomains::energy(const VectorField2& p) const { return ir_energy(p, problem_.f); }

VectorField2 inner_ir_global(std::size_t m, const VectorField2& p, VectorField2 v,
                             const IrProblem& problem, const PartitionOfUnity& pou, double t,
                             std::size_t iterations, std::vector<VectorField2>* history) {
  VectorField2 others(p.grid());
  for (std::size_t l = 0; l < pou.thetas.size(); ++l)
    if (l != m) others += multiply_pointwise(p, pou.thetas[l]);
  const ScalarField& theta = pou.thetas.at(m);
  for (std::size_t it = 0; it < iterations; ++it) {
    ScalarField r = div(v + others);
    r -= problem.f;
    const VectorField2 psi = grad(r);
    weighted_update(v.plane(0), v.plane(1), psi.plane(0), psi.plane(1), theta.values(), t);
    if (history) history->push_back(v);
  }
  return v;
}

DualSolution<VectorField2> dd_solve(const IrProblem& problem, const DdLayout& layout,
                                    const PartitionOfUnity& pou, const DdConfig& cfg,
                                    const DdObserver& observer) {
  cfg.validate();
  const IrSubdomains sub(problem, layout, pou);
  const std::size_t count = layout.count();
  const bool par = cfg.exec == Execution::Parallel;
  std::vector<ScalarField> theta_local;
  for (std::size_t m = 0; m < count; ++m) theta_local.push_back(restrict(pou.thetas[m], layout.rect(m)));

  auto sweep = [&](const VectorField2& p, const std::vector<VectorField2>& previous) {
    std::vector<VectorField2> q(count);
#pragma omp parallel for schedule(dynamic) if (par)
    for (std::ptrdiff_t mi = 0; mi < static_cast<std::ptrdiff_t>(count); ++mi) {
      const auto m = static_cast<std::size_t>(mi);
      q[m] = sub.inner(m, start_value(cfg, p, previous[m], layout.rect(m), theta_local[m]),
                       sub.others(m, p), cfg.t, cfg.max_inner_it);
    }
    return q;
  };
  return outer_loop<VectorField2>(
      layout, cfg, observer, [&](const VectorField2& p) { return sub.energy(p); }, sweep);
}

void write_dd_csv(std::ostream& os, const EnergyTrace& trace, std::optional<double> reference) {
  os << "n,energy,relative_gap\n";
  os.precision(17);
  for (std::size_t n = 0; n < trace.values.size(); ++n) {
    os << n << ',' << trace.values[n] << ',';
    if (reference) os << (trace.values[n] - *reference) / std::abs(*reference);
    os << '\n';
  }
}

}  // namespace tvs
