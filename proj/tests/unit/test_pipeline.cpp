#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "scratch.hpp"
#include "tvstokes/diff_ops.hpp"
#include "tvstokes/field_io.hpp"
#include "tvstokes/pipeline.hpp"

using namespace tvs;

namespace {

PipelineConfig quick() {
  PipelineConfig c;
  c.solver.max_it = 20000;
  return c;
}

}  // namespace

TEST_CASE("constant image passes through") {
  const ScalarField d0 = ScalarField::constant(GridSpec{12, 15, 1.0}, 0.37);
  for (Variant v : {Variant::IRV1, Variant::IRV2}) {
    PipelineConfig c = quick();
    c.variant = v;
    CHECK(run_tvstokes(d0, c).d == d0);
    c.dd = DdSettings{2, 2, 3, 3, {}};
    c.dd->cfg.max_it = 5;
    const PipelineResult r = run_tvstokes(d0, c);
    CHECK(r.d == d0);
    CHECK(max_abs(r.tau) == 0.0);
  }
  CHECK(parse_variant("IRV1") == Variant::IRV1);
  CHECK_THROWS_AS(parse_variant("irv3"), ConfigError);
}

TEST_CASE("denoising improves psnr") {
  const ScalarField gt = phantom_disk_stripes(64);
  const ScalarField noisy = add_noise(gt, {0.0025, 11});
  for (Variant v : {Variant::IRV1, Variant::IRV2}) {
    PipelineConfig c = quick();
    c.variant = v;
    const PipelineResult r = run_tvstokes(noisy, c);
    CHECK(r.tfs.converged);
    CHECK(r.ir.converged);
    CHECK(psnr(r.d, gt) > psnr(noisy, gt));
  }
}

TEST_CASE("dd and plain tangent fields agree") {
  const ScalarField d0 = oracle::random_field<1>(GridSpec{16, 16, 1.0});
  PipelineConfig plain;
  plain.solver.tol = 1e-12;
  const TfsResult a = solve_tfs(d0, plain);
  REQUIRE(a.step.converged);

  PipelineConfig dd = plain;
  dd.dd = DdSettings{2, 2, 4, 3, {}};
  dd.dd->cfg.max_it = 300;
  const TfsResult b = solve_tfs(d0, dd);
  const double ea = a.step.trace.back(), eb = b.step.trace.back();
  CHECK(std::abs(eb - ea) / ea < 1e-4);
  CHECK(squared_norm(b.tau - a.tau) / squared_norm(a.tau) < 1e-4);
}

TEST_CASE("sweep") {
  const ScalarField gt = phantom_gradient_edges(16);
  PipelineConfig c = quick();
  c.sweep.deltas = {0.15};
  c.sweep.irv1_alphas = {10.0};
  c.sweep.epsilons = {1e-3};
  c.sweep.irv2_alphas = {10.0};
  c.sweep.variances = {0.01};
  const SweepReport one = run_sweep(gt, "g", c);
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].best_delta == 0.15);
  std::ostringstream os;
  write_sweep_csv(os, one);
  const std::string csv = os.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  c.sweep.deltas = {0.02, 0.15, 1.2};
  c.sweep.irv1_alphas = {1.0, 10.0};
  c.sweep.epsilons = {1e-3, 0.1};
  c.sweep.irv2_alphas = {1.0, 10.0, 100.0};
  c.sweep.variances = {0.0025, 0.01};
  const SweepReport rep = run_sweep(gt, "g", c);
  REQUIRE(rep.rows.size() == 2);
  for (const SweepRow& r : rep.rows) {
    double best_perf = -INFINITY;
    for (const MetricRow& d : rep.details)
      if (d.noise_variance == r.variance && d.method == "tfs") best_perf = std::max(best_perf, d.report.perf);
    CHECK(r.best_perf == best_perf);
    double best1 = -INFINITY, best2 = -INFINITY;
    for (const MetricRow& d : rep.details) {
      if (d.noise_variance != r.variance) continue;
      if (d.method == "irv1") best1 = std::max(best1, d.report.psnr);
      if (d.method == "irv2") best2 = std::max(best2, d.report.mssim);
    }
    CHECK(r.irv1_psnr.value == best1);
    CHECK(r.irv2_mssim.value == best2);
  }
  CHECK(rep.details.size() == 2 * (1 + 3 + 4 + 3));

  c.exec = Execution::Parallel;
  std::ostringstream a, b;
  write_sweep_csv(a, rep);
  write_sweep_csv(b, run_sweep(gt, "g", c));
  CHECK(a.str() == b.str());

  c.sweep.deltas.clear();
  CHECK_THROWS_AS(run_sweep(gt, "g", c), ConfigError);
}

TEST_CASE("dd experiment") {
  const ScalarField d0 = add_noise(phantom_disk_stripes(16), {0.01, 2});
  DdExperimentConfig cfg;
  cfg.pipeline.dd = DdSettings{2, 2, 4, 3, {}};
  cfg.pipeline.dd->cfg.alpha_hat = 0.25;
  cfg.pipeline.dd->cfg.max_it = 40;
  cfg.reference_max_it = 20000;
  const DdExperimentReport rep = run_dd_experiment(d0, cfg);
  REQUIRE(rep.curves.size() == 5);
  for (const DdCurve& c : rep.curves) {
    CHECK(c.trace.values.size() == 41);
    CHECK(c.trace.values.front() > c.trace.back());
    CHECK(c.relative_gaps().back() == c.relative_gap());
  }
  CHECK(rep.curve("tfs").reference == rep.reference_energies[0]);
  CHECK(rep.curve("irv2_from_ref").reference == rep.reference_energies[2]);
  CHECK_THROWS_AS(rep.curve("nope"), ConfigError);

  const auto dir = oracle::scratch_dir() / "ddx";
  write_dd_experiment(dir, rep);
  for (const char* f : {"summary.csv", "tfs.csv", "irv1_from_dd.csv", "irv1_from_ref.csv", "irv2_from_dd.csv",
                        "irv2_from_ref.csv", "step1.svg", "step2.svg"})
    CHECK(std::filesystem::file_size(dir / f) > 0);
  CHECK(oracle::slurp(dir / "step2.svg").find("irv1_from_ref") != std::string::npos);
  const RawField e = read_tvsf(dir / "reference_energies.tvsf");
  CHECK(e.data == std::vector<double>(rep.reference_energies.begin(), rep.reference_energies.end()));

  // supplied references skip the long runs and give the same report
  DdExperimentConfig again = cfg;
  again.reference_energies = rep.reference_energies;
  again.reference_tangent = from_raw<2>(read_tvsf(dir / "reference_tangent.tvsf"));
  again.reference_max_it = 1;
  const DdExperimentReport r2 = run_dd_experiment(d0, again);
  for (std::size_t k = 0; k < 5; ++k) CHECK(r2.curves[k].trace.values == rep.curves[k].trace.values);

  cfg.pipeline.dd.reset();
  CHECK_THROWS_AS(run_dd_experiment(d0, cfg), ConfigError);
}
