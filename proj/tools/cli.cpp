#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "tvstokes/errors.hpp"
#include "tvstokes/field_io.hpp"
#include "tvstokes/image_io.hpp"
#include "tvstokes/parallel.hpp"
#include "tvstokes/pipeline.hpp"

namespace tvs::cli {

namespace {

// Everything a subcommand can be configured with, from a config file and flags.
struct Settings {
  PipelineConfig pipeline;
  bool use_dd = false;
  double variance = 0.0;
  std::size_t ref_max_it = 1'000'000;
  double ref_tol = 1e-7;
  std::string ref_energies;
  std::string ref_tangent;
  std::string image_id;
  std::optional<std::size_t> max_it;
  std::optional<double> alpha_hat;
};

std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::string s = v;
  for (char& c : s)
    if (c == ',' || c == ';') c = ' ';
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double x;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError("bad number '" + tok + "' for " + key);
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError("empty value for " + key);
  return out;
}

double parse_number(const std::string& v, const std::string& key) {
  const auto l = parse_list(v, key);
  if (l.size() != 1) throw ConfigError(key + " takes a single number");
  return l[0];
}

std::size_t parse_count(const std::string& v, const std::string& key) {
  const double x = parse_number(v, key);
  if (x < 0 || x != std::floor(x)) throw ConfigError(key + " must be a non-negative integer");
  return static_cast<std::size_t>(x);
}

DdSettings& dd_of(Settings& s) {
  s.use_dd = true;
  if (!s.pipeline.dd) s.pipeline.dd = DdSettings{};
  return *s.pipeline.dd;
}

void apply(Settings& s, const std::string& key, const std::string& value) {
  SolverConfig& sc = s.pipeline.solver;
  if (key == "variant") {
    s.pipeline.variant = parse_variant(value);
  } else if (key == "grid") {
    std::size_t m2 = 0, m1 = 0;
    char x = 0, extra = 0;
    if (std::sscanf(value.c_str(), "%zu%c%zu%c", &m2, &x, &m1, &extra) != 3 || (x != 'x' && x != 'X'))
      throw ConfigError("grid must look like M2xM1, got '" + value + "'");
    dd_of(s).m2 = m2;
    dd_of(s).m1 = m1;
  } else if (key == "overlap") {
    const auto l = parse_list(value, key);
    if (l.size() != 2) throw ConfigError("overlap must be sy,sx");
    dd_of(s).overlap_y = parse_count(std::to_string(l[0]), key);
    dd_of(s).overlap_x = parse_count(std::to_string(l[1]), key);
  } else if (key == "delta") {
    sc.delta = parse_number(value, key);
  } else if (key == "alpha") {
    sc.alpha = parse_number(value, key);
  } else if (key == "mu") {
    const double mu = parse_number(value, key);
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    sc.alpha = 1.0 / mu;
  } else if (key == "epsilon") {
    sc.epsilon = parse_number(value, key);
  } else if (key == "step") {
    sc.t = parse_number(value, key);
  } else if (key == "tol") {
    sc.tol = parse_number(value, key);
  } else if (key == "max-it") {
    s.max_it = parse_count(value, key);
    sc.max_it = *s.max_it;
  } else if (key == "max-inner-it") {
    dd_of(s).cfg.max_inner_it = parse_count(value, key);
  } else if (key == "alpha-hat") {
    dd_of(s);
    s.alpha_hat = parse_number(value, key);
  } else if (key == "outer-tol") {
    dd_of(s).cfg.outer_tol = parse_number(value, key);
  } else if (key == "inner-start") {
    if (value == "previous")
      dd_of(s).cfg.start = InnerStart::Previous;
    else if (value == "current")
      dd_of(s).cfg.start = InnerStart::Current;
    else
      throw ConfigError("inner-start must be previous or current");
  } else if (key == "seed") {
    s.pipeline.seed = parse_count(value, key);
  } else if (key == "variance") {
    s.variance = parse_number(value, key);
  } else if (key == "deltas") {
    s.pipeline.sweep.deltas = parse_list(value, key);
  } else if (key == "irv1-alphas") {
    s.pipeline.sweep.irv1_alphas = parse_list(value, key);
  } else if (key == "epsilons") {
    s.pipeline.sweep.epsilons = parse_list(value, key);
  } else if (key == "irv2-alphas") {
    s.pipeline.sweep.irv2_alphas = parse_list(value, key);
  } else if (key == "variances") {
    s.pipeline.sweep.variances = parse_list(value, key);
  } else if (key == "ref-energies") {
    s.ref_energies = value;
  } else if (key == "ref-tangent") {
    s.ref_tangent = value;
  } else if (key == "ref-max-it") {
    s.ref_max_it = parse_count(value, key);
  } else if (key == "ref-tol") {
    s.ref_tol = parse_number(value, key);
  } else if (key == "image-id") {
    s.image_id = value;
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

// mu and alpha name the same weight
void check_exclusive(const std::vector<std::string>& keys, const std::string& where) {
  const bool a = std::find(keys.begin(), keys.end(), "alpha") != keys.end();
  const bool m = std::find(keys.begin(), keys.end(), "mu") != keys.end();
  if (a && m) throw ConfigError("alpha and mu are mutually exclusive (" + where + ")");
}

void apply_config_file(Settings& s, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot read config file " + path);
  std::vector<std::string> keys;
  std::vector<std::pair<std::string, std::string>> items;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(is)) {
    std::string v;
    for (const std::string& in : item.inputs) v += (v.empty() ? "" : ",") + in;
    // settings that were parsed before the grid is known still have to reach the DD config
    items.emplace_back(item.fullname(), v);
    keys.push_back(item.fullname());
  }
  check_exclusive(keys, "config file");
  for (const auto& [k, v] : items)
    if (k == "grid" || k == "overlap") apply(s, k, v);
  for (const auto& [k, v] : items)
    if (k != "grid" && k != "overlap") apply(s, k, v);
}

// Registers string-valued options; values are applied after the config file.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_, "key = value settings file")->check(CLI::ExistingFile);
  }

  Flags& add(const std::string& key, const std::string& help) {
    opts_[key] = app_->add_option("--" + key, values_[key], help);
    return *this;
  }

  void exclusive(const std::string& a, const std::string& b) { opts_.at(a)->excludes(opts_.at(b)); }

  Settings settings() const {
    Settings s;
    if (!config_.empty()) apply_config_file(s, config_);
    for (const char* first : {"grid", "overlap"})
      if (opts_.count(first) && opts_.at(first)->count()) apply(s, first, values_.at(first));
    for (const auto& [k, opt] : opts_)
      if (opt->count() && k != "grid" && k != "overlap") apply(s, k, values_.at(k));
    return s;
  }

 private:
  CLI::App* app_;
  std::string config_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> opts_;
};

void add_solver_flags(Flags& f) {
  f.add("variant", "irv1 or irv2")
      .add("delta", "TFS regularization weight")
      .add("alpha", "IR fidelity weight")
      .add("mu", "1 / alpha")
      .add("epsilon", "normal field smoothing")
      .add("step", "step size t in (0, 1/8]")
      .add("tol", "stopping tolerance T")
      .add("max-it", "iteration cap (outer cap with DD)")
      .add("seed", "noise seed");
  f.exclusive("alpha", "mu");
}

void add_dd_flags(Flags& f) {
  f.add("grid", "subdomains M2xM1 (enables DD)")
      .add("overlap", "overlap sy,sx in pixels")
      .add("max-inner-it", "inner iterations per DD sweep")
      .add("alpha-hat", "DD relaxation weight")
      .add("outer-tol", "DD outer tolerance")
      .add("inner-start", "previous or current");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  return os;
}

// the outer cap and the relaxation weight depend on what was set in total
void finish_dd(Settings& s) {
  if (!s.use_dd) {
    s.pipeline.dd.reset();
    return;
  }
  DdSettings& dd = *s.pipeline.dd;
  if (s.max_it) dd.cfg.max_it = *s.max_it;
  dd.cfg.alpha_hat = s.alpha_hat ? *s.alpha_hat : alpha_hat_for(dd.m1, dd.m2);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TV-Stokes denoising"};
  app.name("tvstokes");
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "OpenMP threads (1 runs the serial kernels)")->check(CLI::PositiveNumber);

  // add-noise
  auto* noise = app.add_subcommand("add-noise", "add Gaussian noise to an image");
  std::string noise_in, noise_out;
  noise->add_option("input", noise_in)->required();
  noise->add_option("output", noise_out)->required();
  Flags noise_flags(noise);
  noise_flags.add("variance", "noise variance").add("seed", "noise seed");

  // denoise
  auto* den = app.add_subcommand("denoise", "run the two-step model on one image");
  std::string den_in, den_out, trace_dir;
  den->add_option("input", den_in)->required();
  den->add_option("output", den_out)->required();
  den->add_option("--trace-dir", trace_dir, "write tfs.csv, ir.csv and tau.tvsf here");
  Flags den_flags(den);
  add_solver_flags(den_flags);
  add_dd_flags(den_flags);

  // sweep
  auto* sw = app.add_subcommand("sweep", "parameter sweep on a ground truth image");
  std::string sw_in, sw_out, sw_details;
  sw->add_option("ground-truth", sw_in)->required();
  sw->add_option("--out", sw_out, "summary CSV")->required();
  sw->add_option("--details", sw_details, "per-parameter metrics CSV");
  Flags sw_flags(sw);
  add_solver_flags(sw_flags);
  sw_flags.add("deltas", "delta list").add("irv1-alphas", "IRV1 alpha list").add("epsilons", "epsilon list");
  sw_flags.add("irv2-alphas", "IRV2 alpha list").add("variances", "noise variances").add("image-id", "name in reports");

  // dd-experiment
  auto* ex = app.add_subcommand("dd-experiment", "DD convergence against long single-domain runs");
  std::string ex_in, ex_dir;
  ex->add_option("input", ex_in, "noisy image")->required();
  ex->add_option("--out-dir", ex_dir)->required();
  Flags ex_flags(ex);
  add_solver_flags(ex_flags);
  add_dd_flags(ex_flags);
  ex_flags.add("variance", "add noise to the input first")
      .add("ref-energies", "TVSF with reference energies tfs, irv1, irv2")
      .add("ref-tangent", "TVSF with the reference tangent field")
      .add("ref-max-it", "reference iteration budget")
      .add("ref-tol", "reference tolerance T");

  // phantom
  auto* ph = app.add_subcommand("phantom", "write one of the generated test images");
  std::string ph_kind, ph_out;
  std::size_t ph_size = 64;
  ph->add_option("kind", ph_kind)->required()->check(CLI::IsMember({"disk-stripes", "gradient-edges"}));
  ph->add_option("output", ph_out)->required();
  ph->add_option("--size", ph_size, "width and height")->check(CLI::Range(8, 4096));

  // metrics
  auto* me = app.add_subcommand("metrics", "PSNR / MSSIM of an image, perf of a tangent field");
  std::string me_d, me_gt;
  me->add_option("result", me_d)->required();
  me->add_option("ground-truth", me_gt)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    const Execution exec = threads > 1 ? Execution::Parallel : Execution::Serial;
    if (threads > 1) set_threads(threads);

    if (noise->parsed()) {
      Settings s = noise_flags.settings();
      const ScalarField gt = load_image(noise_in);
      save_image(add_noise(gt, {s.variance, s.pipeline.seed}), noise_out);
    } else if (den->parsed()) {
      Settings s = den_flags.settings();
      finish_dd(s);
      s.pipeline.exec = exec;
      const ScalarField d0 = load_image(den_in);
      const PipelineResult r = run_tvstokes(d0, s.pipeline);
      save_image(r.d, den_out);
      if (!trace_dir.empty()) {
        std::filesystem::create_directories(trace_dir);
        auto a = open_out(trace_dir + "/tfs.csv");
        r.tfs.trace.write_csv(a);
        auto b = open_out(trace_dir + "/ir.csv");
        r.ir.trace.write_csv(b);
        write_tvsf(std::filesystem::path(trace_dir) / "tau.tvsf", to_raw(r.tau));
      }
      out << "tfs " << r.tfs.iterations << " iterations" << (r.tfs.converged ? "" : " (cap reached)")
          << ", " << to_string(s.pipeline.variant) << ' ' << r.ir.iterations << " iterations"
          << (r.ir.converged ? "" : " (cap reached)") << '\n';
    } else if (sw->parsed()) {
      Settings s = sw_flags.settings();
      s.pipeline.exec = exec;
      const ScalarField gt = load_image(sw_in);
      const std::string id = s.image_id.empty() ? std::filesystem::path(sw_in).stem().string() : s.image_id;
      const SweepReport rep = run_sweep(gt, id, s.pipeline);
      auto os = open_out(sw_out);
      write_sweep_csv(os, rep);
      if (!sw_details.empty()) {
        auto ds = open_out(sw_details);
        write_metrics_header(ds);
        for (const MetricRow& row : rep.details) write_metrics_row(ds, row);
      }
      for (const SweepRow& r : rep.rows)
        out << "variance " << r.variance << ": delta " << r.best_delta << ", irv1 " << r.irv1_psnr.value
            << " dB, irv2 " << r.irv2_psnr.value << " dB (noisy " << r.noisy_psnr << " dB)\n";
    } else if (ex->parsed()) {
      Settings s = ex_flags.settings();
      dd_of(s);
      finish_dd(s);
      s.pipeline.exec = exec;
      DdExperimentConfig cfg;
      cfg.pipeline = s.pipeline;
      cfg.reference_max_it = s.ref_max_it;
      cfg.reference_tol = s.ref_tol;
      if (!s.ref_energies.empty()) {
        const RawField raw = read_tvsf(s.ref_energies);
        if (raw.channels != 1 || raw.data.size() != 3)
          throw FormatError("reference energies must be a 1 channel TVSF with 3 values");
        cfg.reference_energies = std::array<double, 3>{raw.data[0], raw.data[1], raw.data[2]};
      }
      if (!s.ref_tangent.empty()) cfg.reference_tangent = from_raw<2>(read_tvsf(s.ref_tangent));
      ScalarField d0 = load_image(ex_in);
      if (s.variance > 0.0) d0 = add_noise(d0, {s.variance, s.pipeline.seed});
      const DdExperimentReport rep = run_dd_experiment(d0, cfg);
      write_dd_experiment(ex_dir, rep);
      write_dd_summary_csv(out, rep);
    } else if (ph->parsed()) {
      save_image(ph_kind == "disk-stripes" ? phantom_disk_stripes(ph_size) : phantom_gradient_edges(ph_size),
                 ph_out);
    } else if (me->parsed()) {
      auto is_field = [](const std::string& p) { return std::filesystem::path(p).extension() == ".tvsf"; };
      if (is_field(me_d) && is_field(me_gt)) {
        const RawField a = read_tvsf(me_d), b = read_tvsf(me_gt);
        if (a.channels == 2) {
          const VectorField2 ta = from_raw<2>(a), tb = from_raw<2>(b);
          out << "perf\n" << perf_tau(ta, tb) << '\n';
          return kOk;
        }
      }
      const MetricReport m = image_metrics(load_image(me_d), load_image(me_gt));
      out << "psnr,mssim\n";
      if (m.psnr_infinite())
        out << "inf";
      else
        out << m.psnr;
      out << ',' << m.mssim << '\n';
    }
    return kOk;
  } catch (const NumericalDivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const InconsistentFieldError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace tvs::cli
