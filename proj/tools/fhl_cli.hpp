#pragma once

// Command-line front end: solve, simulate, validate, front, moments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fhl/fractional.hpp"
#include "fhl/front2d.hpp"
#include "fhl/io.hpp"
#include "fhl/suite.hpp"

namespace fhl::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kAccuracyError = 3 };

struct RunConfig {
  std::string command;
  std::string preset = "test1";
  std::vector<double> betas{0.4, 0.5, 0.6, 0.8};
  std::vector<std::string> methods{"classical", "quadrature"};
  std::vector<double> xs, ys, times;
  double t_max = 1.0;
  std::size_t nt = 20;
  std::optional<double> dx, lo, hi;
  std::size_t n_intervals = 4000;
  std::optional<double> truncation_M;
  std::size_t paths = 10000;
  std::optional<double> tau_step;
  std::uint64_t seed = 20240917;
  unsigned workers = 1;
  std::string out;
  // custom presets
  std::string datum_csv;
  double lipschitz = 0.0;
  std::string hamiltonian = "quadratic";
  double h_scale = 0.5;
  std::vector<double> centers, radii;
  // moments
  std::vector<double> alphas{1.0, 2.0};
  // validate
  bool all = false;
  std::vector<std::string> checks;
  std::size_t moment_paths = 100000, crossval_paths = 2000, crossval_probes = 20, dpp_paths = 10000;
  // front
  double level = 0.0;
};

inline std::string default_output_dir() {
  const char* env = std::getenv("FHL_OUTPUT_DIR");
  return env && *env ? env : "fhl_output";
}

inline std::string label(double beta) { return "beta" + detail::fmt(beta, 6); }

inline Json to_json(const RunConfig& c) {
  Json j = {{"command", c.command},   {"preset", c.preset}, {"betas", c.betas}, {"methods", c.methods},
            {"x", c.xs},              {"y", c.ys},          {"times", c.times}, {"t_max", c.t_max},
            {"nt", c.nt},             {"n_intervals", c.n_intervals},           {"paths", c.paths},
            {"seed", c.seed},         {"workers", c.workers}};
  j["dx"] = c.dx ? Json(*c.dx) : Json(nullptr);
  j["lo"] = c.lo ? Json(*c.lo) : Json(nullptr);
  j["hi"] = c.hi ? Json(*c.hi) : Json(nullptr);
  j["truncation_M"] = c.truncation_M ? Json(*c.truncation_M) : Json("adaptive-default");
  j["tau_step"] = c.tau_step ? Json(*c.tau_step) : Json("default");
  if (c.preset == "custom")
    j["custom"] = {{"datum_csv", c.datum_csv}, {"lipschitz", c.lipschitz}, {"hamiltonian", c.hamiltonian},
                   {"h_scale", c.h_scale}};
  if (!c.centers.empty()) j["centers"] = c.centers, j["radii"] = c.radii;
  if (c.command == "moments") j["alphas"] = c.alphas;
  if (c.command == "validate")
    j["validate"] = {{"all", c.all},
                     {"checks", c.checks},
                     {"moment_paths", c.moment_paths},
                     {"crossval_paths", c.crossval_paths},
                     {"crossval_probes", c.crossval_probes},
                     {"dpp_paths", c.dpp_paths}};
  if (c.command == "front") j["level"] = c.level;
  return j;
}

/// Working box from the preset default, overridden by --lo/--hi/--dx.
inline SpaceTimeGrid resolve_box(const RunConfig& c, SpaceTimeGrid base) {
  const double dx = c.dx.value_or(base.dx);
  const double lo = c.lo.value_or(base.box[0].lo), hi = c.hi.value_or(base.box[0].hi);
  return base.dimension == 1 ? SpaceTimeGrid::line(lo, hi, dx) : SpaceTimeGrid::square(lo, hi, dx);
}

inline std::vector<double> read_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read datum file " + path);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    for (char& ch : tok)
      if (ch == ',') ch = ' ';
    std::istringstream is(tok);
    double d;
    while (is >> d) v.push_back(d);
  }
  return v;
}

inline Problem build_problem(const RunConfig& c) {
  if (c.preset == "custom") {
    if (c.datum_csv.empty()) throw ValidationError("custom preset needs --datum-csv with lattice values");
    if (!c.dx || !c.lo || !c.hi) throw ValidationError("custom preset needs --lo, --hi and --dx");
    const auto box = SpaceTimeGrid::line(*c.lo, *c.hi, *c.dx);
    auto g = InitialDatum::sampled(read_values(c.datum_csv), c.lipschitz, box);
    HamiltonianSpec h = c.hamiltonian == "norm" ? HamiltonianSpec::norm(1)
                        : c.hamiltonian == "quadratic"
                            ? HamiltonianSpec::scaled_quadratic(c.h_scale, 1)
                            : throw ValidationError("--hamiltonian must be quadratic or norm");
    return make_custom_problem(std::move(g), std::move(h));
  }
  const Preset preset = parse_preset(c.preset);
  Problem p = make_problem(preset, resolve_box(c, default_box(preset)));
  if (!c.centers.empty()) {
    if (preset != Preset::Test3TwoCircles) throw ValidationError("--centers applies to test3-two-circles only");
    if (c.centers.size() % 2 != 0 || c.centers.size() / 2 != c.radii.size())
      throw ValidationError("--centers needs x,y pairs matching --radii");
    std::vector<Point> centers;
    for (std::size_t k = 0; k < c.centers.size(); k += 2) centers.push_back(Point::of(c.centers[k], c.centers[k + 1]));
    p.datum = InitialDatum::two_circles(std::move(centers), c.radii, p.box);
  }
  return p;
}

inline std::vector<double> resolve_times(const RunConfig& c) {
  if (!c.times.empty()) return c.times;
  if (!(c.t_max > 0.0) || c.nt == 0) throw ValidationError("--t-max must be positive and --nt at least 1");
  std::vector<double> t;
  for (std::size_t k = 1; k <= c.nt; ++k) t.push_back(c.t_max * static_cast<double>(k) / static_cast<double>(c.nt));
  return t;
}

inline std::vector<Point> resolve_probes(const RunConfig& c, int dimension) {
  std::vector<Point> pts;
  if (dimension == 1) {
    if (!c.ys.empty()) throw ValidationError("--y is only meaningful for two-dimensional presets");
    for (double x : c.xs) pts.push_back(Point::of(x));
  } else {
    if (c.xs.size() != c.ys.size()) throw ValidationError("two-dimensional probes need matching --x and --y lists");
    for (std::size_t k = 0; k < c.xs.size(); ++k) pts.push_back(Point::of(c.xs[k], c.ys[k]));
  }
  return pts;
}

inline QuadratureConfig quadrature_config(const RunConfig& c) {
  QuadratureConfig q;
  q.n_intervals = c.n_intervals;
  q.truncation_M = c.truncation_M;
  q.workers = c.workers;
  q.validate();
  return q;
}

inline MonteCarloConfig mc_config(const RunConfig& c) {
  MonteCarloConfig m;
  m.n_paths = c.paths;
  m.tau_step = c.tau_step;
  m.seed = c.seed;
  m.workers = c.workers;
  m.validate();
  return m;
}

inline const char* kSolvePlot = R"(import csv
import sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

files = sys.argv[1:] or FILES
fig, ax = plt.subplots()
for name in files:
    with open(name) as fh:
        rows = list(csv.DictReader(fh))
    if "y" in rows[0]:
        continue
    xs = sorted({float(r["x"]) for r in rows})
    ts = sorted({float(r["t"]) for r in rows})
    if len(xs) <= len(ts):
        for x in xs:
            sel = [r for r in rows if float(r["x"]) == x]
            ax.plot([float(r["t"]) for r in sel], [float(r["value"]) for r in sel], label=f"{name[:-4]} x={x:g}")
        ax.set_xlabel("t")
    else:
        t = ts[-1]
        sel = [r for r in rows if float(r["t"]) == t]
        ax.plot([float(r["x"]) for r in sel], [float(r["value"]) for r in sel], label=f"{name[:-4]} t={t:g}")
        ax.set_xlabel("x")
ax.set_ylabel("u")
ax.legend(fontsize="small")
fig.savefig("solve.png", dpi=150)
)";

inline int cmd_solve(const RunConfig& c, RunOutput& out) {
  const Problem p = build_problem(c);
  const auto times = resolve_times(c);
  const auto probes = resolve_probes(c, p.dimension());
  std::vector<std::string> files;
  Json runs = Json::array();
  auto emit = [&](const SolutionField& f, const std::string& stem) {
    out.write_with(stem + ".csv", [&](std::ostream& os) { write_csv(os, f); });
    out.write_json(stem + ".json", field_metadata(f));
    files.push_back(stem + ".csv");
    Json r = {{"file", stem + ".csv"}, {"method", to_string(f.method)}, {"failed_points", f.failed_points},
              {"contaminated_points", f.contaminated_points}};
    if (f.beta) r["beta"] = f.beta->value();
    if (!f.tail_mass.empty()) r["max_tail_mass"] = *std::max_element(f.tail_mass.begin(), f.tail_mass.end());
    runs.push_back(r);
    for (const auto& m : f.messages) out.warn(stem + ": " + m);
  };
  for (const auto& name : c.methods) {
    SolveOptions opt;
    opt.method = parse_method(name);
    opt.quadrature = quadrature_config(c);
    opt.monte_carlo = mc_config(c);
    auto solve = [&](const SolveOptions& o) {
      if (!probes.empty()) return solve_points(p, probes, times, o);
      SpaceTimeGrid g = p.box;
      g.times = times;
      return solve_field(p, g, o);
    };
    const std::string stem = "solve_" + c.preset + "_" + name;
    if (opt.method == Method::Classical) {
      emit(solve(opt), stem);
      continue;
    }
    for (double b : c.betas) {
      opt.beta = FractionalOrder(b);
      emit(solve(opt), stem + "_" + label(b));
    }
  }
  std::string script = "FILES = [";
  for (const auto& f : files) script += "\"" + f + "\", ";
  script += "]\n";
  out.write("plot_solve.py", script + kSolvePlot);
  out.summary()["runs"] = runs;
  return kOk;
}

inline int cmd_simulate(const RunConfig& c, RunOutput& out, std::ostream& log) {
  const Problem p = build_problem(c);
  const auto times = resolve_times(c);
  const auto probes = resolve_probes(c, p.dimension());
  if (probes.empty()) throw ValidationError("simulate needs probe points (--x, and --y in 2D)");
  const auto mc = mc_config(c);
  std::ostringstream csv;
  csv.precision(17);
  csv << (p.dimension() == 2 ? "beta,x,y,t,mean,stderr,samples,contaminated,degenerate,tau_step\n"
                             : "beta,x,t,mean,stderr,samples,contaminated,degenerate,tau_step\n");
  std::size_t contaminated = 0;
  for (double b : c.betas)
    for (const auto& x : probes)
      for (double t : times) {
        const auto e = frac_hopf_lax_mc(p.datum, p.lagrangian, x, t, FractionalOrder(b), mc, p.box);
        csv << b << ',' << x[0] << ',';
        if (p.dimension() == 2) csv << x[1] << ',';
        csv << t << ',' << e.mean << ',' << e.std_error << ',' << e.samples << ',' << e.contaminated << ','
            << e.degenerate << ',' << e.tau_step << '\n';
        contaminated += e.contaminated;
      }
  out.write("simulate_" + c.preset + ".csv", csv.str());
  if (contaminated) out.warn(std::to_string(contaminated) + " samples had minimizers on the box boundary");
  out.summary()["contaminated_samples"] = contaminated;
  out.config()["monte_carlo"] = fhl::to_json(mc);
  log << "wrote " << (out.dir() / ("simulate_" + c.preset + ".csv")).string() << "\n";
  return kOk;
}

inline int cmd_validate(const RunConfig& c, RunOutput& out, std::ostream& log) {
  SuiteOptions o;
  o.betas = c.betas;
  o.moment_paths = c.moment_paths;
  o.crossval_paths = c.crossval_paths;
  o.crossval_probes = c.crossval_probes;
  o.dpp_paths = c.dpp_paths;
  o.seed = c.seed;
  o.workers = c.workers;
  std::vector<NamedCheck> selected;
  for (const auto& chk : suite_checks())
    if (c.all || std::find(c.checks.begin(), c.checks.end(), chk.name) != c.checks.end()) selected.push_back(chk);
  for (const auto& name : c.checks) {
    const bool known = std::any_of(suite_checks().begin(), suite_checks().end(),
                                   [&](const NamedCheck& k) { return k.name == name; });
    if (!known) throw ValidationError("unknown check '" + name + "'");
  }
  if (selected.empty()) throw ValidationError("validate needs --all or --check NAME[,NAME...]");
  bool ok = true;
  Json verdicts = Json::object();
  for (const auto& chk : selected) {
    const auto r = chk.run(o);
    ok = ok && r.passed;
    verdicts[r.name] = r.passed ? "pass" : "fail";
    log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.summary << "\n";
    out.write_json("validate_" + r.name + ".json",
                   {{"name", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"detail", r.detail}});
  }
  out.summary()["verdicts"] = verdicts;
  return ok ? kOk : kValidationFailed;
}

inline int cmd_front(const RunConfig& c, RunOutput& out) {
  const Problem p = [&] {
    RunConfig f = c;
    if (!f.dx) f.dx = 0.1;
    return build_problem(f);
  }();
  if (p.dimension() != 2) throw ValidationError("front requires a two-dimensional preset");
  const auto times = c.times.empty() ? std::vector<double>{0, 1, 2, 3, 6, 9, 12, 15} : c.times;
  SpaceTimeGrid grid = p.box;
  Json radii = Json::object();
  auto run = [&](std::optional<FractionalOrder> beta, const std::string& tag) {
    FrontOptions opt;
    opt.beta = beta;
    opt.quadrature.n_intervals = c.n_intervals == 4000 ? 2000 : c.n_intervals;
    opt.quadrature.truncation_M = c.truncation_M;
    opt.quadrature.workers = c.workers;
    opt.level = c.level;
    const auto contours = evolve_front(p, times, grid, opt);
    const std::string stem = "front_" + c.preset + "_" + tag;
    out.write_with(stem + ".csv", [&](std::ostream& os) { write_contours_csv(os, contours); });
    out.write_with("plot_" + stem + ".py", [&](std::ostream& os) { write_contour_plot_script(os, stem + ".csv", stem + ".png"); });
    Json rows = Json::array();
    for (const auto& s : radius_series(contours)) rows.push_back(fhl::to_json(s));
    for (const auto& k : contours)
      if (k.touches_boundary) out.warn(stem + ": contour at t=" + detail::fmt(k.time) + " touches the box boundary");
    radii[tag] = rows;
  };
  run(std::nullopt, "classical");
  for (double b : c.betas) run(FractionalOrder(b), label(b));
  out.write_json("front_" + c.preset + "_radii.json", radii);
  out.summary()["radii"] = radii;
  return kOk;
}

inline int cmd_moments(const RunConfig& c, RunOutput& out, std::ostream& log) {
  const auto mc = mc_config(c);
  const auto times = c.times.empty() ? std::vector<double>{0.5, 1.0, 2.0} : c.times;
  const auto table = moment_table(c.alphas, c.betas, times, mc);
  std::ostringstream csv;
  csv.precision(17);
  csv << "alpha,beta,t,analytic,mc_mean,mc_stderr,z,tau_step\n";
  double worst = 0.0;
  for (const auto& r : table) {
    csv << r.alpha << ',' << r.beta << ',' << r.t << ',' << r.analytic << ',' << r.mc_mean << ',' << r.mc_std_error
        << ',' << r.z << ',' << r.tau_step << '\n';
    log << "alpha=" << r.alpha << " beta=" << r.beta << " t=" << r.t << ": analytic " << r.analytic << ", MC "
        << r.mc_mean << " +- " << r.mc_std_error << " (z=" << detail::fmt(r.z, 3) << ")\n";
    worst = std::max(worst, r.z);
  }
  out.write("moments.csv", csv.str());
  out.summary()["max_z"] = worst;
  out.config()["monte_carlo"] = fhl::to_json(mc);
  return kOk;
}

/// Parses argv, runs the command and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  c.out = default_output_dir();
  CLI::App app{"Caputo time-fractional Hamilton-Jacobi solver (subordinated Hopf-Lax formula)"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  auto common = [&](CLI::App* s) {
    s->add_option("--out", c.out, "Output directory (default $FHL_OUTPUT_DIR or ./fhl_output)");
    s->add_option("--seed", c.seed, "Random seed");
    s->add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    s->add_option("--beta", c.betas, "Fractional orders in (0,1)")->delimiter(',')->capture_default_str();
  };
  auto problem = [&](CLI::App* s) {
    s->add_option("--preset", c.preset, "test1|test2|test3-circle|test3-two-circles|custom")->capture_default_str();
    s->add_option("--x", c.xs, "Probe x coordinates")->delimiter(',');
    s->add_option("--y", c.ys, "Probe y coordinates (2D presets)")->delimiter(',');
    s->add_option("--t", c.times, "Output times")->delimiter(',');
    s->add_option("--t-max", c.t_max, "Largest time when --t is absent")->capture_default_str();
    s->add_option("--nt", c.nt, "Number of uniform times up to --t-max")->capture_default_str();
    s->add_option("--dx", c.dx, "Lattice spacing");
    s->add_option("--lo", c.lo, "Lower box edge");
    s->add_option("--hi", c.hi, "Upper box edge");
    s->add_option("--n-intervals", c.n_intervals, "Quadrature intervals on [0, M]")->capture_default_str();
    s->add_option("--truncation-M", c.truncation_M, "Fixed truncation M (default adaptive)");
    s->add_option("--paths", c.paths, "Monte Carlo paths")->capture_default_str();
    s->add_option("--tau-step", c.tau_step, "Operational time step (default 1e-3 E[E_t])");
    s->add_option("--datum-csv", c.datum_csv, "Custom preset: datum values on the lattice");
    s->add_option("--lipschitz", c.lipschitz, "Custom preset: Lipschitz constant of the datum");
    s->add_option("--hamiltonian", c.hamiltonian, "Custom preset: quadratic|norm")->capture_default_str();
    s->add_option("--h-scale", c.h_scale, "Custom preset: c in H = c|p|^2")->capture_default_str();
    s->add_option("--centers", c.centers, "Two-circle preset: x1,y1,x2,y2,...")->delimiter(',');
    s->add_option("--radii", c.radii, "Two-circle preset: radii")->delimiter(',');
  };

  auto* solve = app.add_subcommand("solve", "Solution fields or probe curves per (beta, method)");
  common(solve);
  problem(solve);
  solve->add_option("--method", c.methods, "classical,quadrature,monte_carlo")->delimiter(',')->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates with standard errors at probes");
  common(simulate);
  problem(simulate);

  auto* validate = app.add_subcommand("validate", "Run the validation suite; exit 1 on any failure");
  common(validate);
  validate->add_flag("--all", c.all, "Run every check");
  validate->add_option("--check", c.checks, "Checks to run")->delimiter(',');
  validate->add_option("--moment-paths", c.moment_paths)->capture_default_str();
  validate->add_option("--crossval-paths", c.crossval_paths)->capture_default_str();
  validate->add_option("--crossval-probes", c.crossval_probes)->capture_default_str();
  validate->add_option("--dpp-paths", c.dpp_paths)->capture_default_str();

  auto* front = app.add_subcommand("front", "Zero level set evolution of a 2D preset");
  common(front);
  problem(front);
  front->add_option("--level", c.level, "Level of the front")->capture_default_str();

  auto* moments = app.add_subcommand("moments", "C(alpha,beta) t^(alpha beta) against Monte Carlo");
  common(moments);
  moments->add_option("--alpha", c.alphas, "Moment orders")->delimiter(',')->capture_default_str();
  moments->add_option("--t", c.times, "Times (default 0.5,1,2)")->delimiter(',');
  moments->add_option("--paths", c.paths, "Monte Carlo paths")->capture_default_str();
  moments->add_option("--tau-step", c.tau_step, "Operational time step");

  bool betas_given = false;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, log, err) == 0 ? kOk : kConfigError;
  }
  auto* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  betas_given = sub->count("--beta") > 0;
  if (c.command == "validate" && !betas_given) c.betas.clear();
  if (c.command == "moments" && c.paths == 10000 && sub->count("--paths") == 0) c.paths = 100000;

  try {
    RunOutput out(c.out);
    out.config() = to_json(c);
    int code = kOk;
    try {
      for (double b : c.betas) (void)FractionalOrder(b);
      if (c.command == "solve") code = cmd_solve(c, out);
      else if (c.command == "simulate") code = cmd_simulate(c, out, log);
      else if (c.command == "validate") code = cmd_validate(c, out, log);
      else if (c.command == "front") code = cmd_front(c, out);
      else code = cmd_moments(c, out, log);
    } catch (const AccuracyError& e) {
      err << "accuracy error: " << e.what() << "\n";
      code = kAccuracyError;
    } catch (const TruncationError& e) {
      err << "accuracy error: " << e.what() << "\n";
      code = kAccuracyError;
    } catch (const Error& e) {
      err << "configuration error: " << e.what() << "\n";
      code = kConfigError;
    }
    if (code == kAccuracyError || code == kConfigError) out.summary()["error"] = true;
    out.finish(c.command, code);
    return code;
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace fhl::cli
