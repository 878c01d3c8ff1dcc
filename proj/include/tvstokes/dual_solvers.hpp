#pragma once

// Semi-implicit (Chambolle) iterations for the three dual problems
//
//   TFS:  min_{|p_k| <= 1} || P multi_div p - P tau0 / delta ||^2   on the extended grid
//   IR:   min_{|p| <= 1}   || div p - f ||^2                          on the image grid
//
// with f = alpha d0 - div xi (IRV1) or f = alpha (d0 - g) (IRV2), and the
// primal recoveries that turn dual solutions back into fields.

#include <iosfwd>
#include <vector>

#include "tvstokes/projection.hpp"

namespace tvs {

struct SolverConfig {
  double delta = 0.15;    // TFS regularization weight
  double alpha = 10.0;    // IR fidelity weight (mu = 1/alpha)
  double epsilon = 1e-3;  // smoothing of the normal field xi
  double t = 0.125;       // step size, 0 < t <= 1/8
  std::size_t max_it = 1'000'000;
  double tol = 1e-7;  // T in the sqrt-energy stopping rule

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Dual energies D(p^0), D(p^1), ...
struct EnergyTrace {
  std::vector<double> values;

  // CSV with header "iteration,energy,sqrt_energy_delta"; the delta of the
  // first row is empty.
  void write_csv(std::ostream& os) const;
  bool empty() const noexcept { return values.empty(); }
  double back() const { return values.back(); }
};

template <typename P>
struct DualSolution {
  P p;
  EnergyTrace trace;
  std::size_t iterations = 0;  // number of updates performed
  bool converged = false;      // stopping rule fired before max_it
};

// Semi-implicit update of one 2-vector row: (p + t psi) / (1 + t |psi|).
// `px, py` and `qx, qy` are planes of the same size.
void chambolle_update(std::span<double> px, std::span<double> py,
                      std::span<const double> psix, std::span<const double> psiy, double t);

double tfs_energy(const TensorField2x2& p, const VectorField2& tau0_proj, double delta);
double tfs_energy(const TensorField2x2& p, const VectorField2& tau0_proj, double delta,
                  const Projector& projector);

DualSolution<TensorField2x2> chambolle_tfs(const VectorField2& tau0, const SolverConfig& cfg);

// tau = P tau0 - delta P multi_div p.
VectorField2 recover_tangent(const TensorField2x2& p, const VectorField2& tau0, double delta);

// xi = tau_perp / sqrt(|tau_perp|^2 + eps) with tau_perp = R_image (tau_y, -tau_x).
VectorField2 compute_xi(const VectorField2& tau, double epsilon);

// g on the image grid with neumann backward differences equal to
// R_image (tau_y, -tau_x): integrated down the first column, then along each
// row, then shifted to zero mean. Throws InconsistentFieldError when the
// divergence of tau exceeds `max_div_residual` in the h-weighted norm.
ScalarField integrate_g(const VectorField2& tau, double max_div_residual = 1e-6);

// Same relation integrated along the first row first, then down columns.
ScalarField integrate_g_column_path(const VectorField2& tau);

// Max difference between the two integration paths (zero for exactly
// divergence-free tau).
double integration_path_mismatch(const VectorField2& tau);

double ir_energy(const VectorField2& p, const ScalarField& f);

DualSolution<VectorField2> chambolle_ir(const ScalarField& f, const SolverConfig& cfg);

// alpha d0 - div xi
ScalarField irv1_data(const ScalarField& d0, const VectorField2& xi, double alpha);
// alpha (d0 - g)
ScalarField irv2_data(const ScalarField& d0, const ScalarField& g, double alpha);

// d = d0 - (div p + div xi) / alpha
ScalarField recover_image_irv1(const VectorField2& p, const VectorField2& xi,
                               const ScalarField& d0, double alpha);
// d = d0 - div p / alpha
ScalarField recover_image_irv2(const VectorField2& p, const ScalarField& d0, double alpha);

}  // namespace tvs
