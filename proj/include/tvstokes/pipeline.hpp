#pragma once

// Two-step TV-Stokes denoising end to end: tangent field smoothing, then image
// reconstruction (IRV1 or IRV2), either with the plain dual solvers or with
// the domain decomposition. Plus the parameter sweep and the DD experiment.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tvstokes/dd.hpp"
#include "tvstokes/dual_solvers.hpp"
#include "tvstokes/metrics.hpp"

namespace tvs {

enum class Variant { IRV1, IRV2 };

Variant parse_variant(const std::string& s);  // "irv1" / "irv2", any case
std::string to_string(Variant v);

struct NoiseSpec {
  double variance = 0.0;
  std::uint64_t seed = 0;
};

// gt + N(0, variance) per pixel from a 64-bit Mersenne twister; not clipped.
ScalarField add_noise(const ScalarField& gt, const NoiseSpec& spec);

// Test images in [0, 1]: a disk next to a block of vertical stripes, and a
// smooth ramp with a raised square and a darker triangle.
ScalarField phantom_disk_stripes(std::size_t n);
ScalarField phantom_gradient_edges(std::size_t n);

struct DdSettings {
  std::size_t m2 = 3;
  std::size_t m1 = 3;
  std::size_t overlap_y = 4;
  std::size_t overlap_x = 3;
  DdConfig cfg;
};

// Parameter grids of the sweep protocol.
struct SweepLists {
  std::vector<double> deltas{0.001, 0.002, 0.005, 0.01, 0.02, 0.04, 0.08,
                             0.15,  0.3,   0.6,   1.2,  2.5,  5.0,  10.0};
  std::vector<double> irv1_alphas{1.0 / 30, 0.1, 1.0 / 3, 1.0, 10.0 / 3, 10.0,
                                  100.0 / 3, 100.0, 1000.0 / 3, 1000.0, 10000.0 / 3};
  std::vector<double> epsilons{10.0, 1.0, 0.1, 1e-2, 1e-3, 1e-4, 1e-7, 1e-10, 1e-13};
  std::vector<double> irv2_alphas{1e-6, 3e-6, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2,
                                  0.1,  0.3,  1.0,  3.0,  10.0, 30.0, 100.0, 300.0, 1000.0};
  std::vector<double> variances{1e-4, 0.0025, 0.01, 0.09};
};

struct PipelineConfig {
  SolverConfig solver;  // delta, alpha, epsilon, t, tol, max_it
  Variant variant = Variant::IRV2;
  std::optional<DdSettings> dd;  // plain solvers when empty
  SweepLists sweep;
  std::uint64_t seed = 1;
  Execution exec = Execution::Serial;  // DD sweeps and parameter sweeps

  void validate() const;
};

struct StepOutcome {
  EnergyTrace trace;
  std::size_t iterations = 0;
  bool converged = false;
};

struct TfsResult {
  VectorField2 tau;  // on the extended grid
  StepOutcome step;
};

struct IrResult {
  ScalarField d;
  StepOutcome step;
};

struct PipelineResult {
  ScalarField d;
  VectorField2 tau;
  StepOutcome tfs;
  StepOutcome ir;
};

TfsResult solve_tfs(const ScalarField& d0, const PipelineConfig& cfg);
IrResult solve_ir(const ScalarField& d0, const VectorField2& tau, Variant variant,
                  const PipelineConfig& cfg);
PipelineResult run_tvstokes(const ScalarField& d0, const PipelineConfig& cfg);

// ---------------------------------------------------------------- sweep

struct BestParams {
  double value = 0.0;  // PSNR or MSSIM
  double alpha = 0.0;
  double epsilon = 0.0;  // IRV1 only
};

struct SweepRow {
  double variance = 0.0;
  double noisy_psnr = 0.0;
  double noisy_mssim = 0.0;
  double best_delta = 0.0;
  double best_perf = 0.0;
  BestParams irv1_psnr, irv1_mssim, irv2_psnr, irv2_mssim;
};

struct SweepReport {
  std::string image_id;
  std::vector<SweepRow> rows;       // one per noise variance
  std::vector<MetricRow> details;   // every evaluated parameter point
};

// For each variance: add noise, pick delta maximizing perf_tau against the
// tangent field of gt, then try every IR parameter with that field.
SweepReport run_sweep(const ScalarField& gt, const std::string& image_id, const PipelineConfig& cfg);

void write_sweep_csv(std::ostream& os, const SweepReport& report);

// ---------------------------------------------------------------- DD experiment

struct DdExperimentConfig {
  PipelineConfig pipeline;  // solver parameters and DD settings (dd must be set)
  std::size_t reference_max_it = 1'000'000;
  double reference_tol = 1e-7;
  std::optional<std::array<double, 3>> reference_energies;  // tfs, irv1, irv2
  std::optional<VectorField2> reference_tangent;
};

struct DdCurve {
  std::string name;
  EnergyTrace trace;
  double reference = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  double relative_gap() const;  // (last - reference) / |reference|
  std::vector<double> relative_gaps() const;
};

struct DdExperimentReport {
  std::array<double, 3> reference_energies{};
  VectorField2 reference_tangent;
  VectorField2 dd_tangent;
  std::vector<DdCurve> curves;  // tfs, irv1_from_dd, irv1_from_ref, irv2_from_dd, irv2_from_ref

  const DdCurve& curve(const std::string& name) const;
};

// Long single-domain reference runs, then DD for step 1 and for step 2 both
// from the DD tangent field and from the reference one.
DdExperimentReport run_dd_experiment(const ScalarField& d0, const DdExperimentConfig& cfg);

// summary.csv, one <curve>.csv per curve, step1.svg, step2.svg and the
// reference fixtures reference_energies.tvsf / reference_tangent.tvsf.
void write_dd_experiment(const std::filesystem::path& dir, const DdExperimentReport& report);

void write_dd_summary_csv(std::ostream& os, const DdExperimentReport& report);

}  // namespace tvs
