#include "stable_estim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stable_estim/oracle.hpp"
#include "stable_estim/stable_core.hpp"
#include "stable_estim/validation.hpp"

namespace stable_estim::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) { return ordered_json(v).dump(); }

constexpr std::uint64_t kDefaultSeed = 12345;

// Everything a subcommand can consume, after merging flags with an optional
// config file (flags win).
struct Options {
  std::string model;  // "linear-mix" | "sub-gaussian"
  std::vector<double> a;
  std::vector<double> gammas;
  std::vector<double> sigmas;
  double rho = 0.0;
  double alpha = 0.0;
  double gamma = 1.0;  // density subcommand
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = kDefaultSeed;
  bool seed_set = false;
  std::size_t n = 0;
  double tol = 1e-8;
  double x_min = -5.0;
  double x_max = 5.0;
  std::size_t points = 101;
  std::vector<double> alphas;
};

// Per-subcommand flag bundle; values not given on the command line fall back
// to the config file, then to the built-in defaults.
struct FlagSet {
  CLI::App* cmd = nullptr;
  Options opts;
  std::string config_path;
  std::vector<std::pair<std::string, CLI::Option*>> tracked;

  CLI::Option* track(const std::string& key, CLI::Option* opt) {
    tracked.emplace_back(key, opt);
    return opt;
  }
};

void add_model_flags(FlagSet& fs) {
  auto* c = fs.cmd;
  fs.track("model", c->add_option("--model", fs.opts.model,
                                  "Model family: linear-mix or sub-gaussian"));
  fs.track("a", c->add_option("--a", fs.opts.a,
                              "Mixing matrix, row-major: a11,a12,a21,a22")
                   ->delimiter(','));
  fs.track("gammas", c->add_option("--gammas", fs.opts.gammas,
                                   "Component dispersions gammaZ1,gammaZ2")
                         ->delimiter(','));
  fs.track("sigmas", c->add_option("--sigmas", fs.opts.sigmas,
                                   "Gaussian standard deviations sigma1,sigma2")
                         ->delimiter(','));
  fs.track("rho", c->add_option("--rho", fs.opts.rho, "Gaussian correlation"));
  fs.track("alpha", c->add_option("--alpha", fs.opts.alpha, "Stability exponent"));
}

void add_output_flags(FlagSet& fs) {
  auto* c = fs.cmd;
  fs.track("format", c->add_option("--format", fs.opts.format, "csv or json"));
  fs.track("output", c->add_option("--output", fs.opts.output,
                                   "Output path (default: stdout)"));
  fs.track("seed", c->add_option("--seed", fs.opts.seed, "Generator seed"));
  c->add_option("--config", fs.config_path,
                "JSON config file mirroring the flags; flags override");
}

// Applies config-file values to options that were not passed explicitly.
void merge_config(FlagSet& fs) {
  nlohmann::json conf;
  if (!fs.config_path.empty()) {
    std::ifstream in(fs.config_path);
    if (!in) {
      throw std::invalid_argument("cannot open config file: " + fs.config_path);
    }
    in >> conf;
  }
  auto absent = [&](const std::string& key, CLI::Option* opt) {
    return opt->count() == 0 && conf.contains(key);
  };
  for (auto& [key, opt] : fs.tracked) {
    if (!absent(key, opt)) {
      continue;
    }
    const auto& v = conf.at(key);
    if (key == "model") fs.opts.model = v.get<std::string>();
    else if (key == "a") fs.opts.a = v.get<std::vector<double>>();
    else if (key == "gammas") fs.opts.gammas = v.get<std::vector<double>>();
    else if (key == "sigmas") fs.opts.sigmas = v.get<std::vector<double>>();
    else if (key == "rho") fs.opts.rho = v.get<double>();
    else if (key == "alpha") fs.opts.alpha = v.get<double>();
    else if (key == "gamma") fs.opts.gamma = v.get<double>();
    else if (key == "format") fs.opts.format = v.get<std::string>();
    else if (key == "output") fs.opts.output = v.get<std::string>();
    else if (key == "seed") { fs.opts.seed = v.get<std::uint64_t>(); fs.opts.seed_set = true; }
    else if (key == "n") fs.opts.n = v.get<std::size_t>();
    else if (key == "tol") fs.opts.tol = v.get<double>();
    else if (key == "x-min") fs.opts.x_min = v.get<double>();
    else if (key == "x-max") fs.opts.x_max = v.get<double>();
    else if (key == "points") fs.opts.points = v.get<std::size_t>();
    else if (key == "alphas") fs.opts.alphas = v.get<std::vector<double>>();
  }
  for (auto& [key, opt] : fs.tracked) {
    if (key == "seed" && opt->count() > 0) {
      fs.opts.seed_set = true;
    }
  }
  if (!fs.opts.seed_set) {
    if (const char* env = std::getenv("STABLE_ESTIM_SEED")) {
      fs.opts.seed = std::strtoull(env, nullptr, 10);
    }
  }
  if (fs.opts.format != "csv" && fs.opts.format != "json") {
    throw std::invalid_argument("format must be csv or json");
  }
}

ModelSpec make_model(const Options& o) {
  if (o.model == "linear-mix") {
    if (o.a.size() != 4) {
      throw std::invalid_argument("linear-mix needs --a a11,a12,a21,a22");
    }
    if (o.gammas.size() != 2) {
      throw std::invalid_argument("linear-mix needs --gammas gammaZ1,gammaZ2");
    }
    return build_model(o.a[0], o.a[1], o.a[2], o.a[3], o.gammas[0], o.gammas[1],
                       o.alpha);
  }
  if (o.model == "sub-gaussian") {
    if (o.sigmas.size() != 2) {
      throw std::invalid_argument("sub-gaussian needs --sigmas sigma1,sigma2");
    }
    return ModelSpec(SubGaussianModel(o.alpha, o.sigmas[0], o.sigmas[1], o.rho));
  }
  throw std::invalid_argument("--model must be linear-mix or sub-gaussian");
}

std::string model_string(const Options& o) {
  std::ostringstream os;
  if (o.model == "linear-mix") {
    os << "linear-mix(a=[" << fmt(o.a[0]) << "," << fmt(o.a[1]) << "," << fmt(o.a[2])
       << "," << fmt(o.a[3]) << "],gammas=[" << fmt(o.gammas[0]) << ","
       << fmt(o.gammas[1]) << "],alpha=" << fmt(o.alpha) << ")";
  } else {
    os << "sub-gaussian(sigmas=[" << fmt(o.sigmas[0]) << "," << fmt(o.sigmas[1])
       << "],rho=" << fmt(o.rho) << ",alpha=" << fmt(o.alpha) << ")";
  }
  return os.str();
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) {
        throw std::invalid_argument("cannot open output file: " + path);
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

ordered_json slope_json(const SlopeResult& r) {
  ordered_json j;
  j["value"] = r.value;
  j["tie_value"] = r.tie_value ? ordered_json(*r.tie_value) : nullptr;
  j["case"] = to_string(r.case_tag);
  j["provenance"] = to_string(r.provenance);
  j["flat_interval"] = r.flat_interval;
  return j;
}

int cmd_sample(const Options& o, std::ostream& os) {
  if (o.n == 0) {
    throw std::invalid_argument("sample needs --n >= 1");
  }
  const ModelSpec spec = make_model(o);
  Rng rng(o.seed);
  std::vector<PairXY> pairs;
  if (const auto* lm = std::get_if<LinearMixModel>(&spec)) {
    pairs = sample_joint(*lm, rng, o.n);
  } else {
    pairs = sample_subgaussian(std::get<SubGaussianModel>(spec), rng, o.n);
  }
  if (o.format == "csv") {
    os << "x,y\n";
    for (const auto& p : pairs) {
      os << fmt(p.x) << "," << fmt(p.y) << "\n";
    }
  } else {
    ordered_json j;
    j["schema"] = "stable-estim/pairs/v1";
    j["model"] = model_string(o);
    j["seed"] = o.seed;
    j["n"] = o.n;
    auto rows = ordered_json::array();
    for (const auto& p : pairs) {
      rows.push_back({p.x, p.y});
    }
    j["pairs"] = std::move(rows);
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_density(const Options& o, std::ostream& os) {
  if (o.points < 2) {
    throw std::invalid_argument("density needs --points >= 2");
  }
  if (!(o.x_max > o.x_min)) {
    throw std::invalid_argument("density needs x-max > x-min");
  }
  const StableParams p(o.alpha, o.gamma);
  const double step = (o.x_max - o.x_min) / static_cast<double>(o.points - 1);
  if (o.format == "csv") {
    os << "x,pdf,cf\n";
    for (std::size_t i = 0; i < o.points; ++i) {
      const double x = o.x_min + step * static_cast<double>(i);
      os << fmt(x) << "," << fmt(sas_pdf(p, x)) << "," << fmt(sas_cf(p, x)) << "\n";
    }
  } else {
    ordered_json j;
    j["schema"] = "stable-estim/density/v1";
    j["alpha"] = o.alpha;
    j["gamma"] = o.gamma;
    auto rows = ordered_json::array();
    for (std::size_t i = 0; i < o.points; ++i) {
      const double x = o.x_min + step * static_cast<double>(i);
      rows.push_back({{"x", x}, {"pdf", sas_pdf(p, x)}, {"cf", sas_cf(p, x)}});
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << "\n";
  }
  return 0;
}

struct SlopePair {
  double conditional;
  SlopeResult optimal;
};

SlopePair slopes_of(const ModelSpec& spec) {
  if (const auto* lm = std::get_if<LinearMixModel>(&spec)) {
    return {conditional_mean_slope(*lm), optimal_slope(*lm)};
  }
  const auto& sg = std::get<SubGaussianModel>(spec);
  return {conditional_mean_slope_sg(sg), optimal_slope_sg(sg)};
}

void slope_csv_row(std::ostream& os, double alpha_col, bool with_alpha,
                   const SlopePair& sp) {
  if (with_alpha) {
    os << fmt(alpha_col) << ",";
  }
  os << fmt(sp.conditional) << "," << fmt(sp.optimal.value) << ","
     << (sp.optimal.tie_value ? fmt(*sp.optimal.tie_value) : "") << ","
     << to_string(sp.optimal.case_tag) << ","
     << (sp.optimal.flat_interval ? "true" : "false") << "\n";
}

int cmd_slopes(const Options& o, std::ostream& os) {
  const ModelSpec spec = make_model(o);
  const SlopePair sp = slopes_of(spec);
  if (o.format == "csv") {
    os << "conditional_slope,optimal_slope,optimal_slope_tie,case,flat_interval\n";
    slope_csv_row(os, 0.0, false, sp);
  } else {
    ordered_json j;
    j["schema"] = "stable-estim/slopes/v1";
    j["model"] = model_string(o);
    j["conditional_slope"] = sp.conditional;
    j["optimal_slope"] = sp.optimal.value;
    j["optimal_slope_tie"] =
        sp.optimal.tie_value ? ordered_json(*sp.optimal.tie_value) : nullptr;
    j["case"] = to_string(sp.optimal.case_tag);
    j["flat_interval"] = sp.optimal.flat_interval;
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_optimize(const Options& o, std::ostream& os) {
  const ModelSpec spec = make_model(o);
  if (!std::holds_alternative<LinearMixModel>(spec)) {
    const auto& sg = std::get<SubGaussianModel>(spec);
    const SlopeResult opt = optimal_slope_sg(sg);
    ordered_json j;
    j["schema"] = "stable-estim/optimize/v1";
    j["model"] = model_string(o);
    j["result"] = slope_json(opt);
    j["closed_form"] = opt.value;
    j["abs_difference"] = 0.0;
    j["error_scale_at_optimum"] = error_scale_sg(sg, opt.value);
    if (o.format == "json") {
      os << j.dump(2) << "\n";
    } else {
      os << "optimal_slope_numeric,optimal_slope_tie,case,provenance,closed_form,"
            "abs_difference,error_scale_at_optimum\n";
      os << fmt(opt.value) << ",," << to_string(opt.case_tag) << ","
         << to_string(opt.provenance) << "," << fmt(opt.value) << ",0,"
         << fmt(error_scale_sg(sg, opt.value)) << "\n";
    }
    return 0;
  }

  const auto& lm = std::get<LinearMixModel>(spec);
  const SlopeResult num = minimize_error_scale_numeric(lm, o.tol);
  const SlopeResult closed = optimal_slope(lm);
  const double diff = std::abs(num.value - closed.value);
  if (o.format == "csv") {
    os << "optimal_slope_numeric,optimal_slope_tie,case,provenance,closed_form,"
          "abs_difference,error_scale_at_optimum\n";
    os << fmt(num.value) << "," << (num.tie_value ? fmt(*num.tie_value) : "") << ","
       << to_string(num.case_tag) << "," << to_string(num.provenance) << ","
       << fmt(closed.value) << "," << fmt(diff) << ","
       << fmt(error_scale(lm, num.value)) << "\n";
  } else {
    ordered_json j;
    j["schema"] = "stable-estim/optimize/v1";
    j["model"] = model_string(o);
    j["result"] = slope_json(num);
    j["closed_form"] = closed.value;
    j["abs_difference"] = diff;
    j["error_scale_at_optimum"] = error_scale(lm, num.value);
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_validate(const Options& o, std::ostream& os) {
  const ModelSpec spec = make_model(o);
  ValidationConfig cfg;
  if (o.n > 0) {
    cfg.n_samples = o.n;
  }
  cfg.seed = o.seed;
  const ValidationReport rep = run_validation(spec, cfg);
  if (o.format == "json") {
    os << rep.to_json().dump(2) << "\n";
  } else {
    os << "check,theory,oracle,mc,se,tol,pass\n";
    for (const auto& c : rep.checks) {
      os << c.check << "," << (c.theory ? fmt(*c.theory) : "") << ","
         << (c.oracle ? fmt(*c.oracle) : "") << "," << (c.mc ? fmt(*c.mc) : "")
         << "," << (c.se ? fmt(*c.se) : "") << "," << fmt(c.tol) << ","
         << (c.pass ? "true" : "false") << "\n";
    }
  }
  return rep.overall ? 0 : 1;
}

std::vector<double> default_sweep_grid() {
  return {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.95};
}

int cmd_sweep(const Options& o, std::ostream& os) {
  const std::vector<double> grid = o.alphas.empty() ? default_sweep_grid() : o.alphas;
  Options probe = o;
  if (o.format == "csv") {
    os << "alpha,conditional_slope,optimal_slope,optimal_slope_tie,case\n";
    for (const double a : grid) {
      probe.alpha = a;
      const SlopePair sp = slopes_of(make_model(probe));
      os << fmt(a) << "," << fmt(sp.conditional) << "," << fmt(sp.optimal.value)
         << "," << (sp.optimal.tie_value ? fmt(*sp.optimal.tie_value) : "") << ","
         << to_string(sp.optimal.case_tag) << "\n";
    }
  } else {
    ordered_json j;
    j["schema"] = "stable-estim/sweep/v1";
    j["model"] = model_string(o);
    auto rows = ordered_json::array();
    for (const double a : grid) {
      probe.alpha = a;
      const SlopePair sp = slopes_of(make_model(probe));
      ordered_json r;
      r["alpha"] = a;
      r["conditional_slope"] = sp.conditional;
      r["optimal_slope"] = sp.optimal.value;
      r["optimal_slope_tie"] =
          sp.optimal.tie_value ? ordered_json(*sp.optimal.tie_value) : nullptr;
      r["case"] = to_string(sp.optimal.case_tag);
      rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear estimators for bivariate symmetric alpha-stable models"};
  app.require_subcommand(1);

  FlagSet sample_fs, density_fs, slopes_fs, optimize_fs, validate_fs, sweep_fs;

  sample_fs.cmd = app.add_subcommand("sample", "Draw (X, Y) pairs to CSV/JSON");
  add_model_flags(sample_fs);
  add_output_flags(sample_fs);
  sample_fs.track("n", sample_fs.cmd->add_option("--n", sample_fs.opts.n,
                                                 "Number of pairs"));

  density_fs.cmd = app.add_subcommand("density", "Tabulate a scalar SaS pdf and CF");
  add_output_flags(density_fs);
  density_fs.track("alpha", density_fs.cmd->add_option("--alpha", density_fs.opts.alpha,
                                                       "Stability exponent"));
  density_fs.track("gamma", density_fs.cmd->add_option("--gamma", density_fs.opts.gamma,
                                                       "Dispersion"));
  density_fs.track("x-min", density_fs.cmd->add_option("--x-min", density_fs.opts.x_min,
                                                       "Grid start"));
  density_fs.track("x-max", density_fs.cmd->add_option("--x-max", density_fs.opts.x_max,
                                                       "Grid end"));
  density_fs.track("points", density_fs.cmd->add_option("--points", density_fs.opts.points,
                                                        "Grid size"));

  slopes_fs.cmd = app.add_subcommand(
      "slopes", "Conditional-mean and dispersion-optimal slopes");
  add_model_flags(slopes_fs);
  add_output_flags(slopes_fs);

  optimize_fs.cmd = app.add_subcommand(
      "optimize", "Numeric error-scale minimization vs the closed form");
  add_model_flags(optimize_fs);
  add_output_flags(optimize_fs);
  optimize_fs.track("tol", optimize_fs.cmd->add_option("--tol", optimize_fs.opts.tol,
                                                       "Bracket tolerance"));

  validate_fs.cmd = app.add_subcommand("validate", "Run the validation battery");
  add_model_flags(validate_fs);
  add_output_flags(validate_fs);
  validate_fs.track("n", validate_fs.cmd->add_option("--n", validate_fs.opts.n,
                                                     "Monte Carlo sample size"));

  sweep_fs.cmd = app.add_subcommand("sweep", "Slopes over an alpha grid");
  add_model_flags(sweep_fs);
  add_output_flags(sweep_fs);
  sweep_fs.track("alphas", sweep_fs.cmd->add_option("--alphas", sweep_fs.opts.alphas,
                                                    "Alpha grid")
                               ->delimiter(','));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    for (FlagSet* fs : {&sample_fs, &density_fs, &slopes_fs, &optimize_fs,
                        &validate_fs, &sweep_fs}) {
      if (fs->cmd->parsed()) {
        merge_config(*fs);
        Sink sink(fs->opts.output, out);
        if (fs == &sample_fs) return cmd_sample(fs->opts, sink.stream());
        if (fs == &density_fs) return cmd_density(fs->opts, sink.stream());
        if (fs == &slopes_fs) return cmd_slopes(fs->opts, sink.stream());
        if (fs == &optimize_fs) return cmd_optimize(fs->opts, sink.stream());
        if (fs == &validate_fs) return cmd_validate(fs->opts, sink.stream());
        return cmd_sweep(fs->opts, sink.stream());
      }
    }
    err << "error: no subcommand given\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace stable_estim::cli
