#include "tvstokes/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <random>
#include <sstream>

#include "tvstokes/diff_ops.hpp"
#include "tvstokes/errors.hpp"
#include "tvstokes/field_io.hpp"
#include "tvstokes/svg.hpp"

namespace tvs {

namespace {

// Runs fn(0..n-1), in parallel when asked; rethrows the lowest-index failure.
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const bool par = exec == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (std::size_t k = 0; k < n; ++k) {
    try {
      fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct DdGeometry {
  DdLayout extended;
  PartitionOfUnity extended_pou;
  DdLayout image;
  PartitionOfUnity image_pou;
};

DdGeometry dd_geometry(const GridSpec& image, const DdSettings& s) {
  DdGeometry g;
  g.extended = build_layout(image.extended(), s.m2, s.m1, s.overlap_y, s.overlap_x);
  g.extended_pou = build_partition_of_unity(g.extended);
  g.image = g.extended.restricted_to(image);
  g.image_pou = g.extended_pou.restricted_to(image);
  return g;
}

DdConfig dd_config(const PipelineConfig& cfg) {
  DdConfig c = cfg.dd->cfg;
  c.t = cfg.solver.t;
  c.exec = cfg.exec;
  return c;
}

template <typename P>
StepOutcome outcome(const DualSolution<P>& s) {
  return {s.trace, s.iterations, s.converged};
}

ScalarField ir_data(const ScalarField& d0, const VectorField2& tau, Variant variant, double alpha,
                    double epsilon, VectorField2* xi) {
  if (variant == Variant::IRV1) {
    *xi = compute_xi(tau, epsilon);
    return irv1_data(d0, *xi, alpha);
  }
  return irv2_data(d0, integrate_g(tau), alpha);
}

ScalarField ir_recover(const VectorField2& p, const VectorField2& xi, const ScalarField& d0,
                       Variant variant, double alpha) {
  return variant == Variant::IRV1 ? recover_image_irv1(p, xi, d0, alpha)
                                  : recover_image_irv2(p, d0, alpha);
}

double mean_component_psnr(const VectorField2& a, const VectorField2& b) {
  return 0.5 * (psnr(component(a, 0), component(b, 0)) + psnr(component(a, 1), component(b, 1)));
}

double mean_component_mssim(const VectorField2& a, const VectorField2& b) {
  return 0.5 * (mssim(component(a, 0), component(b, 0)) + mssim(component(a, 1), component(b, 1)));
}

std::string params_string(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ';';
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

}  // namespace

Variant parse_variant(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "irv1") return Variant::IRV1;
  if (l == "irv2") return Variant::IRV2;
  throw ConfigError("unknown variant '" + s + "' (expected irv1 or irv2)");
}

std::string to_string(Variant v) { return v == Variant::IRV1 ? "irv1" : "irv2"; }

ScalarField add_noise(const ScalarField& gt, const NoiseSpec& spec) {
  if (!(spec.variance >= 0.0)) throw ConfigError("noise variance must be non-negative");
  ScalarField out = gt;
  if (spec.variance == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(spec.variance));
  for (double& v : out.values()) v += noise(rng);
  return out;
}

ScalarField phantom_disk_stripes(std::size_t n) {
  ScalarField f = ScalarField::constant(GridSpec{n, n, 1.0}, 0.15);
  const double nn = static_cast<double>(n);
  const double cy = 0.4 * nn, cx = 0.33 * nn, r = 0.22 * nn;
  const std::size_t stripe = std::max<std::size_t>(2, n / 16);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double y = i + 0.5, x = j + 0.5;
      if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r) f(i, j) = 0.85;
      if (x >= 0.65 * nn && x < 0.93 * nn && y >= 0.12 * nn && y < 0.88 * nn)
        f(i, j) = (j / stripe) % 2 ? 0.7 : 0.3;
    }
  return f;
}

ScalarField phantom_gradient_edges(std::size_t n) {
  ScalarField f(GridSpec{n, n, 1.0});
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double y = (i + 0.5) / nn, x = (j + 0.5) / nn;
      double v = 0.15 + 0.4 * x + 0.15 * y;
      if (x > 0.2 && x < 0.5 && y > 0.2 && y < 0.5) v += 0.3;
      if (y > 0.55 && x > 0.45 && y - 0.55 > 0.9 - x) v -= 0.2;
      f(i, j) = std::clamp(v, 0.0, 1.0);
    }
  return f;
}

void PipelineConfig::validate() const {
  solver.validate();
  if (dd) {
    dd->cfg.validate();
    if (dd->m1 == 0 || dd->m2 == 0) throw ConfigError("subdomain grid must be at least 1x1");
  }
}

TfsResult solve_tfs(const ScalarField& d0, const PipelineConfig& cfg) {
  cfg.validate();
  const VectorField2 tau0 = tangent_field(d0);
  if (!cfg.dd) {
    const auto sol = chambolle_tfs(tau0, cfg.solver);
    return {recover_tangent(sol.p, tau0, cfg.solver.delta), outcome(sol)};
  }
  const DdGeometry g = dd_geometry(d0.grid(), *cfg.dd);
  const auto sol = dd_solve(make_tfs_problem(tau0, cfg.solver.delta), g.extended, g.extended_pou, dd_config(cfg));
  return {recover_tangent(sol.p, tau0, cfg.solver.delta), outcome(sol)};
}

IrResult solve_ir(const ScalarField& d0, const VectorField2& tau, Variant variant, const PipelineConfig& cfg) {
  cfg.validate();
  VectorField2 xi;
  const ScalarField f = ir_data(d0, tau, variant, cfg.solver.alpha, cfg.solver.epsilon, &xi);
  if (!cfg.dd) {
    const auto sol = chambolle_ir(f, cfg.solver);
    return {ir_recover(sol.p, xi, d0, variant, cfg.solver.alpha), outcome(sol)};
  }
  const DdGeometry g = dd_geometry(d0.grid(), *cfg.dd);
  const auto sol = dd_solve(IrProblem{f}, g.image, g.image_pou, dd_config(cfg));
  return {ir_recover(sol.p, xi, d0, variant, cfg.solver.alpha), outcome(sol)};
}

PipelineResult run_tvstokes(const ScalarField& d0, const PipelineConfig& cfg) {
  TfsResult tfs = solve_tfs(d0, cfg);
  IrResult ir = solve_ir(d0, tfs.tau, cfg.variant, cfg);
  return {std::move(ir.d), std::move(tfs.tau), std::move(tfs.step), std::move(ir.step)};
}

// ---------------------------------------------------------------- sweep

SweepReport run_sweep(const ScalarField& gt, const std::string& image_id, const PipelineConfig& cfg) {
  cfg.validate();
  const SweepLists& lists = cfg.sweep;
  if (lists.deltas.empty() || lists.irv1_alphas.empty() || lists.epsilons.empty() ||
      lists.irv2_alphas.empty() || lists.variances.empty())
    throw ConfigError("sweep lists must not be empty");

  // parameter points run independently; inside them everything is serial
  PipelineConfig point = cfg;
  point.exec = Execution::Serial;
  const VectorField2 tau_gt = tangent_field(gt);

  SweepReport report;
  report.image_id = image_id;
  for (double variance : lists.variances) {
    const ScalarField noisy = add_noise(gt, {variance, cfg.seed});
    SweepRow row;
    row.variance = variance;
    row.noisy_psnr = psnr(noisy, gt);
    row.noisy_mssim = mssim(noisy, gt);
    report.details.push_back({image_id, variance, "noisy", "", {row.noisy_psnr, row.noisy_mssim, 0.0}});

    std::vector<VectorField2> taus(lists.deltas.size());
    std::vector<double> perf(lists.deltas.size());
    for_each_index(lists.deltas.size(), cfg.exec, [&](std::size_t k) {
      PipelineConfig c = point;
      c.solver.delta = lists.deltas[k];
      taus[k] = solve_tfs(noisy, c).tau;
      perf[k] = perf_tau(taus[k], tau_gt);
    });
    for (std::size_t k = 0; k < taus.size(); ++k) {
      MetricReport m{mean_component_psnr(taus[k], tau_gt), mean_component_mssim(taus[k], tau_gt), perf[k]};
      report.details.push_back({image_id, variance, "tfs", params_string({{"delta", lists.deltas[k]}, {"perf", perf[k]}}), m});
    }
    const std::size_t best = argmax(perf);
    row.best_delta = lists.deltas[best];
    row.best_perf = perf[best];
    const VectorField2& tau = taus[best];

    // IRV1 over alpha x epsilon, IRV2 over alpha
    const std::size_t n1 = lists.irv1_alphas.size() * lists.epsilons.size();
    const std::size_t n2 = lists.irv2_alphas.size();
    std::vector<MetricReport> m1(n1), m2(n2);
    for_each_index(n1 + n2, cfg.exec, [&](std::size_t k) {
      PipelineConfig c = point;
      if (k < n1) {
        c.solver.alpha = lists.irv1_alphas[k / lists.epsilons.size()];
        c.solver.epsilon = lists.epsilons[k % lists.epsilons.size()];
        m1[k] = image_metrics(solve_ir(noisy, tau, Variant::IRV1, c).d, gt);
      } else {
        c.solver.alpha = lists.irv2_alphas[k - n1];
        m2[k - n1] = image_metrics(solve_ir(noisy, tau, Variant::IRV2, c).d, gt);
      }
    });

    row.irv1_psnr.value = row.irv1_mssim.value = -INFINITY;
    for (std::size_t k = 0; k < n1; ++k) {
      const double a = lists.irv1_alphas[k / lists.epsilons.size()];
      const double e = lists.epsilons[k % lists.epsilons.size()];
      report.details.push_back({image_id, variance, "irv1", params_string({{"alpha", a}, {"epsilon", e}}), m1[k]});
      if (m1[k].psnr > row.irv1_psnr.value) row.irv1_psnr = {m1[k].psnr, a, e};
      if (m1[k].mssim > row.irv1_mssim.value) row.irv1_mssim = {m1[k].mssim, a, e};
    }
    row.irv2_psnr.value = row.irv2_mssim.value = -INFINITY;
    for (std::size_t k = 0; k < n2; ++k) {
      const double a = lists.irv2_alphas[k];
      report.details.push_back({image_id, variance, "irv2", params_string({{"alpha", a}}), m2[k]});
      if (m2[k].psnr > row.irv2_psnr.value) row.irv2_psnr = {m2[k].psnr, a, 0.0};
      if (m2[k].mssim > row.irv2_mssim.value) row.irv2_mssim = {m2[k].mssim, a, 0.0};
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "image,noise_variance,noisy_psnr,noisy_mssim,best_delta,best_perf,"
        "irv1_psnr,irv1_psnr_alpha,irv1_psnr_epsilon,irv1_mssim,irv1_mssim_alpha,irv1_mssim_epsilon,"
        "irv2_psnr,irv2_psnr_alpha,irv2_mssim,irv2_mssim_alpha\n";
  os.precision(10);
  for (const SweepRow& r : report.rows) {
    os << report.image_id << ',' << r.variance << ',' << r.noisy_psnr << ',' << r.noisy_mssim << ','
       << r.best_delta << ',' << r.best_perf << ',' << r.irv1_psnr.value << ',' << r.irv1_psnr.alpha << ','
       << r.irv1_psnr.epsilon << ',' << r.irv1_mssim.value << ',' << r.irv1_mssim.alpha << ','
       << r.irv1_mssim.epsilon << ',' << r.irv2_psnr.value << ',' << r.irv2_psnr.alpha << ','
       << r.irv2_mssim.value << ',' << r.irv2_mssim.alpha << '\n';
  }
}

// ---------------------------------------------------------------- DD experiment

double DdCurve::relative_gap() const { return (trace.back() - reference) / std::abs(reference); }

std::vector<double> DdCurve::relative_gaps() const {
  std::vector<double> g;
  g.reserve(trace.values.size());
  for (double e : trace.values) g.push_back((e - reference) / std::abs(reference));
  return g;
}

const DdCurve& DdExperimentReport::curve(const std::string& name) const {
  for (const DdCurve& c : curves)
    if (c.name == name) return c;
  throw ConfigError("no curve named " + name);
}

DdExperimentReport run_dd_experiment(const ScalarField& d0, const DdExperimentConfig& cfg) {
  const PipelineConfig& pc = cfg.pipeline;
  if (!pc.dd) throw ConfigError("the DD experiment needs DD settings");
  pc.validate();
  const double alpha = pc.solver.alpha;
  const double eps = pc.solver.epsilon;

  SolverConfig ref = pc.solver;
  ref.max_it = cfg.reference_max_it;
  ref.tol = cfg.reference_tol;

  DdExperimentReport report;
  const VectorField2 tau0 = tangent_field(d0);
  if (cfg.reference_tangent) {
    report.reference_tangent = *cfg.reference_tangent;
    report.reference_tangent.check_same_grid(tau0);
  }
  if (cfg.reference_energies) report.reference_energies = *cfg.reference_energies;
  if (!cfg.reference_tangent || !cfg.reference_energies) {
    const auto tfs = chambolle_tfs(tau0, ref);
    if (!cfg.reference_tangent) report.reference_tangent = recover_tangent(tfs.p, tau0, pc.solver.delta);
    if (!cfg.reference_energies) {
      report.reference_energies[0] = tfs.trace.back();
      VectorField2 xi;
      for (Variant v : {Variant::IRV1, Variant::IRV2}) {
        const ScalarField f = ir_data(d0, report.reference_tangent, v, alpha, eps, &xi);
        report.reference_energies[v == Variant::IRV1 ? 1 : 2] = chambolle_ir(f, ref).trace.back();
      }
    }
  }

  const DdGeometry g = dd_geometry(d0.grid(), *pc.dd);
  const DdConfig dc = dd_config(pc);
  const auto tfs = dd_solve(make_tfs_problem(tau0, pc.solver.delta), g.extended, g.extended_pou, dc);
  report.dd_tangent = recover_tangent(tfs.p, tau0, pc.solver.delta);
  report.curves.push_back({"tfs", tfs.trace, report.reference_energies[0], tfs.iterations, tfs.converged});

  for (Variant v : {Variant::IRV1, Variant::IRV2}) {
    const double reference = report.reference_energies[v == Variant::IRV1 ? 1 : 2];
    for (const auto* source : {&report.dd_tangent, &report.reference_tangent}) {
      VectorField2 xi;
      const ScalarField f = ir_data(d0, *source, v, alpha, eps, &xi);
      const auto sol = dd_solve(IrProblem{f}, g.image, g.image_pou, dc);
      const std::string name = to_string(v) + (source == &report.dd_tangent ? "_from_dd" : "_from_ref");
      report.curves.push_back({name, sol.trace, reference, sol.iterations, sol.converged});
    }
  }
  return report;
}

void write_dd_summary_csv(std::ostream& os, const DdExperimentReport& report) {
  os << "curve,reference_energy,final_energy,relative_gap,outer_iterations,converged\n";
  os.precision(17);
  for (const DdCurve& c : report.curves)
    os << c.name << ',' << c.reference << ',' << c.trace.back() << ',' << c.relative_gap() << ','
       << c.iterations << ',' << (c.converged ? 1 : 0) << '\n';
}

void write_dd_experiment(const std::filesystem::path& dir, const DdExperimentReport& report) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw FormatError("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("summary.csv");
    write_dd_summary_csv(os, report);
  }
  for (const DdCurve& c : report.curves) {
    auto os = open(c.name + ".csv");
    write_dd_csv(os, c.trace, c.reference);
  }
  auto abs_gaps = [](const DdCurve& c) {
    std::vector<double> g = c.relative_gaps();
    for (double& v : g) v = std::abs(v);
    return g;
  };
  {
    auto os = open("step1.svg");
    write_svg_chart(os, {"Step 1 (TFS): DD energy against reference", "outer iteration",
                         "|D - D_ref| / D_ref", true},
                    {{"tfs", abs_gaps(report.curve("tfs"))}});
  }
  {
    auto os = open("step2.svg");
    std::vector<Series> s;
    for (const DdCurve& c : report.curves)
      if (c.name != "tfs") s.push_back({c.name, abs_gaps(c)});
    write_svg_chart(os, {"Step 2: DD energies against reference", "outer iteration",
                         "|D - D_ref| / D_ref", true},
                    s);
  }
  const auto& e = report.reference_energies;
  write_tvsf(dir / "reference_energies.tvsf", RawField{1, GridSpec{1, 3, 1.0}, {e[0], e[1], e[2]}});
  write_tvsf(dir / "reference_tangent.tvsf", to_raw(report.reference_tangent));
}

}  // namespace tvs
