#include "tvstokes/dual_solvers.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <ostream>

#include "tvstokes/diff_ops.hpp"

namespace tvs {
namespace {

void check_finite(double energy, std::size_t n) {
  if (!std::isfinite(energy)) {
    throw NumericalDivergenceError("dual energy became non-finite at iteration " +
                                   std::to_string(n));
  }
}

bool sqrt_energy_converged(double previous, double current, double threshold) {
  return std::abs(std::sqrt(previous) - std::sqrt(current)) < threshold;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(t > 0.0) || t > 0.125) throw ConfigError("step size t must lie in (0, 1/8]");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
}

void EnergyTrace::write_csv(std::ostream& os) const {
  os << "iteration,energy,sqrt_energy_delta\n";
  os.precision(17);
  for (std::size_t n = 0; n < values.size(); ++n) {
    os << n << ',' << values[n] << ',';
    if (n > 0) os << std::abs(std::sqrt(values[n - 1]) - std::sqrt(values[n]));
    os << '\n';
  }
}

void chambolle_update(std::span<double> px, std::span<double> py,
                      std::span<const double> psix, std::span<const double> psiy, double t) {
  for (std::size_t k = 0; k < px.size(); ++k) {
    const double mag = std::sqrt(psix[k] * psix[k] + psiy[k] * psiy[k]);
    const double denom = 1.0 + t * mag;
    assert(denom >= 1.0);
    px[k] = (px[k] + t * psix[k]) / denom;
    py[k] = (py[k] + t * psiy[k]) / denom;
  }
}

double tfs_energy(const TensorField2x2& p, const VectorField2& tau0_proj, double delta,
                  const Projector& projector) {
  VectorField2 r = projector.apply(multi_div(p));
  r.axpy(-1.0 / delta, tau0_proj);
  return squared_norm(r);
}

double tfs_energy(const TensorField2x2& p, const VectorField2& tau0_proj, double delta) {
  return tfs_energy(p, tau0_proj, delta, Projector(p.grid()));
}

DualSolution<TensorField2x2> chambolle_tfs(const VectorField2& tau0, const SolverConfig& cfg) {
  cfg.validate();
  const GridSpec grid = tau0.grid();
  const Projector projector(grid);
  // P tau0 is cached: the energy and the update both use the projected data.
  VectorField2 f = projector.apply(tau0);
  f *= 1.0 / cfg.delta;

  const double threshold =
      std::sqrt(2.0 * static_cast<double>(grid.size())) * cfg.tol;

  DualSolution<TensorField2x2> sol{TensorField2x2(grid), {}, 0, false};
  TensorField2x2 psi(grid);
  for (std::size_t n = 0;; ++n) {
    VectorField2 r = projector.apply(multi_div(sol.p));
    r -= f;
    const double energy = squared_norm(r);
    check_finite(energy, n);
    sol.trace.values.push_back(energy);
    if (n > 0 && sqrt_energy_converged(sol.trace.values[n - 1], energy, threshold)) {
      sol.converged = true;
      break;
    }
    if (n == cfg.max_it) break;

    for (std::size_t k = 0; k < 2; ++k) {
      kernels::grad(r.plane(k), grid.rows, grid.cols, grid.h, psi.plane(2 * k),
                    psi.plane(2 * k + 1));
      chambolle_update(sol.p.plane(2 * k), sol.p.plane(2 * k + 1), psi.plane(2 * k),
                       psi.plane(2 * k + 1), cfg.t);
    }
    ++sol.iterations;
  }
  return sol;
}

VectorField2 recover_tangent(const TensorField2x2& p, const VectorField2& tau0, double delta) {
  const Projector projector(tau0.grid());
  VectorField2 tau = projector.apply(tau0);
  tau.axpy(-delta, projector.apply(multi_div(p)));
  return tau;
}

namespace {

// R_image (tau_y, -tau_x) as two planes on the image grid.
VectorField2 perp_on_image(const VectorField2& tau) {
  if (tau.rows() < 2 || tau.cols() < 2) throw ShapeError("tangent field grid too small");
  const GridSpec image{tau.rows() - 1, tau.cols() - 1, tau.h()};
  VectorField2 out(image);
  for (std::size_t i = 0; i < image.rows; ++i) {
    for (std::size_t j = 0; j < image.cols; ++j) {
      out(0, i, j) = tau(1, i, j);
      out(1, i, j) = -tau(0, i, j);
    }
  }
  return out;
}

void subtract_mean(ScalarField& g) {
  double mean = 0.0;
  for (double v : g.values()) mean += v;
  mean /= static_cast<double>(g.plane_size());
  for (double& v : g.values()) v -= mean;
}

}  // namespace

VectorField2 compute_xi(const VectorField2& tau, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  VectorField2 xi = perp_on_image(tau);
  auto x = xi.plane(0);
  auto y = xi.plane(1);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double inv = 1.0 / std::sqrt(x[k] * x[k] + y[k] * y[k] + epsilon);
    x[k] *= inv;
    y[k] *= inv;
  }
  return xi;
}

ScalarField integrate_g(const VectorField2& tau, double max_div_residual) {
  const double residual = norm(div(tau));
  if (residual > max_div_residual) {
    throw InconsistentFieldError(
        "tangent field is not divergence-free (residual " + std::to_string(residual) + ")",
        residual);
  }
  const VectorField2 perp = perp_on_image(tau);
  const double h = tau.h();
  ScalarField g(perp.grid());
  for (std::size_t i = 1; i < g.rows(); ++i) g(i, 0) = g(i - 1, 0) + h * perp(1, i, 0);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 1; j < g.cols(); ++j) g(i, j) = g(i, j - 1) + h * perp(0, i, j);
  }
  subtract_mean(g);
  return g;
}

ScalarField integrate_g_column_path(const VectorField2& tau) {
  const VectorField2 perp = perp_on_image(tau);
  const double h = tau.h();
  ScalarField g(perp.grid());
  for (std::size_t j = 1; j < g.cols(); ++j) g(0, j) = g(0, j - 1) + h * perp(0, 0, j);
  for (std::size_t i = 1; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = g(i - 1, j) + h * perp(1, i, j);
  }
  subtract_mean(g);
  return g;
}

double integration_path_mismatch(const VectorField2& tau) {
  const ScalarField a = integrate_g(tau, std::numeric_limits<double>::infinity());
  return max_abs(a - integrate_g_column_path(tau));
}

double ir_energy(const VectorField2& p, const ScalarField& f) {
  ScalarField r = div(p);
  r -= f;
  return squared_norm(r);
}

DualSolution<VectorField2> chambolle_ir(const ScalarField& f, const SolverConfig& cfg) {
  cfg.validate();
  const GridSpec grid = f.grid();
  const double threshold = std::sqrt(static_cast<double>(grid.size())) * cfg.tol;

  DualSolution<VectorField2> sol{VectorField2(grid), {}, 0, false};
  ScalarField r(grid);
  VectorField2 psi(grid);
  for (std::size_t n = 0;; ++n) {
    kernels::div(sol.p.plane(0), sol.p.plane(1), grid.rows, grid.cols, grid.h, r.values());
    r -= f;
    const double energy = squared_norm(r);
    check_finite(energy, n);
    sol.trace.values.push_back(energy);
    if (n > 0 && sqrt_energy_converged(sol.trace.values[n - 1], energy, threshold)) {
      sol.converged = true;
      break;
    }
    if (n == cfg.max_it) break;

    kernels::grad(r.values(), grid.rows, grid.cols, grid.h, psi.plane(0), psi.plane(1));
    chambolle_update(sol.p.plane(0), sol.p.plane(1), psi.plane(0), psi.plane(1), cfg.t);
    ++sol.iterations;
  }
  return sol;
}

ScalarField irv1_data(const ScalarField& d0, const VectorField2& xi, double alpha) {
  ScalarField f = d0;
  f *= alpha;
  f -= div(xi);
  return f;
}

ScalarField irv2_data(const ScalarField& d0, const ScalarField& g, double alpha) {
  ScalarField f = d0 - g;
  f *= alpha;
  return f;
}

ScalarField recover_image_irv1(const VectorField2& p, const VectorField2& xi,
                               const ScalarField& d0, double alpha) {
  ScalarField d = d0;
  d.axpy(-1.0 / alpha, div(p) + div(xi));
  return d;
}

ScalarField recover_image_irv2(const VectorField2& p, const ScalarField& d0, double alpha) {
  ScalarField d = d0;
  d.axpy(-1.0 / alpha, div(p));
  return d;
}

}  // namespace tvs
