#include "loewner/cli.hpp"

#include <cmath>
#include <sstream>

#include <CLI11.hpp>

#include "loewner/conditions.hpp"
#include "loewner/continuity.hpp"
#include "loewner/driver_io.hpp"
#include "loewner/errors.hpp"
#include "loewner/gallery.hpp"
#include "loewner/io.hpp"
#include "loewner/regularity.hpp"
#include "loewner/trace.hpp"
#include "loewner/validation.hpp"

namespace loewner::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  // driver source
  std::string driver_file;
  std::string gallery;
  double c = 1.0, alpha = 0.75, eps = 0.1, horizon = 1.0;
  std::uint64_t seed = 7;
  std::vector<std::string> params;  // key=value
  // common
  int n = 256;
  std::string out_dir = "out";
  std::vector<std::string> formats;
  int threads = 0;
  double rtol = 0.0;
  double base_step = 0.0;
  bool force = false;
  // trace
  std::string method = "per-anchor";
  bool sqrt_time = false;
  // check
  std::string condition = "all";
  // derivative
  std::vector<double> t0s;
  double fd_h = 1e-3;
  // validate
  std::vector<std::string> only;
  // sweep
  std::string perturbation = "bump";
  std::vector<double> magnitudes;
};

struct Flags {
  CLI::Option* c = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* horizon = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* rtol = nullptr;
  CLI::Option* base_step = nullptr;
};

void add_driver_source(CLI::App* app, Options& o, Flags& f) {
  auto* file = app->add_option("--driver", o.driver_file, "driver file (JSON)");
  auto* gal = app->add_option("--gallery", o.gallery, "gallery driver name (see gallery-list)");
  file->excludes(gal);
  f.c = app->add_option("--c", o.c, "gallery parameter c");
  f.alpha = app->add_option("--alpha", o.alpha, "gallery parameter alpha");
  f.eps = app->add_option("--eps", o.eps, "gallery parameter eps");
  f.horizon = app->add_option("--horizon", o.horizon, "horizon T of a gallery driver");
  f.seed = app->add_option("--seed", o.seed, "seed of the random driver and of jitter sweeps");
  app->add_option("--param", o.params, "extra gallery parameter key=value")->take_all();
}

void add_common(CLI::App* app, Options& o, Flags& f, bool grid = true) {
  if (grid) app->add_option("--n", o.n, "grid points")->check(CLI::Range(2, 1 << 22));
  app->add_option("--out", o.out_dir, "output directory");
  app->add_option("--format", o.formats, "output formats: csv, json, svg")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  app->add_option("--threads", o.threads, "thread cap (overrides LOEWNER_THREADS)")->check(CLI::NonNegativeNumber);
  f.rtol = app->add_option("--rtol", o.rtol, "solver relative tolerance")->check(CLI::PositiveNumber);
  f.base_step = app->add_option("--base-step", o.base_step,
                                "fixed step as a fraction of the span; disables error control")
                    ->check(CLI::PositiveNumber);
  app->add_flag("--force", o.force, "skip condition prechecks");
}

bool wants(const Options& o, const std::string& fmt, bool by_default) {
  if (o.formats.empty()) return by_default;
  return std::find(o.formats.begin(), o.formats.end(), fmt) != o.formats.end();
}

nlohmann::json scalar(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return text;
  }
}

Driver load(const Options& o, const Flags& f) {
  if (!o.driver_file.empty()) return load_driver(o.driver_file);
  if (o.gallery.empty()) throw DomainError("give exactly one driver source: --driver FILE or --gallery NAME");
  nlohmann::json p = nlohmann::json::object();
  if (f.c->count()) p["c"] = o.c;
  if (f.alpha->count()) p["alpha"] = o.alpha;
  if (f.eps->count()) p["eps"] = o.eps;
  if (f.horizon->count()) p["horizon"] = o.horizon;
  if (f.seed->count()) p["seed"] = o.seed;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw DomainError("--param expects key=value, got '" + kv + "'");
    p[kv.substr(0, eq)] = scalar(kv.substr(eq + 1));
  }
  return make_example(o.gallery, p);
}

SolverConfig solver_config(const Options& o, const Flags& f) {
  SolverConfig cfg;
  if (f.rtol->count()) cfg.rtol = o.rtol;
  if (f.base_step->count()) {
    cfg.adaptive = false;
    cfg.base_step = o.base_step;
  }
  return cfg;
}

nlohmann::json config_echo(const Options& o, const Flags& f, const Driver* d) {
  nlohmann::json j{{"n", o.n}, {"out", o.out_dir}, {"formats", o.formats}, {"force", o.force}};
  if (d) j["driver"] = driver_to_json(*d);
  if (!o.driver_file.empty()) j["driver_file"] = o.driver_file;
  if (f.rtol && f.rtol->count()) j["rtol"] = o.rtol;
  if (f.base_step && f.base_step->count()) j["base_step"] = o.base_step;
  if (f.seed && f.seed->count()) j["seed"] = o.seed;
  return j;
}

void write_manifest(const Options& o, const std::string& sub, const nlohmann::json& config) {
  write_text(fs::path(o.out_dir) / "manifest.json", make_manifest(sub, config).dump(2) + "\n");
}

// ---- subcommands ----

int cmd_trace(const Options& o, const Flags& f, std::ostream& out, std::ostream& err) {
  const Driver d = load(o, f);
  nlohmann::json config = config_echo(o, f, &d);
  config["method"] = o.method;
  write_manifest(o, "trace", config);

  TraceConfig tc;
  tc.solver = solver_config(o, f);
  tc.force = o.force;
  const auto grid = uniform_grid(d.horizon(), o.n);
  TracePath p;
  try {
    p = o.method == "incremental" ? trace_incremental(d, grid, tc) : trace_per_anchor(d, grid, tc);
  } catch (const ConditionFailure& e) {
    err << "condition check failed: " << e.what() << "\n";
    return check_fail;
  } catch (const NonConvergence& e) {
    err << "nonconvergence: " << e.what() << "\n";
    return nonconvergence;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return nonconvergence;
  } catch (const DriftError& e) {
    err << "drift: " << e.what() << "\n";
    return nonconvergence;
  }

  const fs::path dir(o.out_dir);
  if (wants(o, "csv", true)) write_text(dir / "trace.csv", trace_csv(p, o.sqrt_time));
  if (wants(o, "svg", false)) write_text(dir / "trace.svg", trace_svg(p, d));
  if (wants(o, "json", false)) {
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t k = 0; k < p.t.size(); ++k)
      pts.push_back({p.t[k], p.gamma[k].real(), p.gamma[k].imag(), p.err[k]});
    write_text(dir / "trace.json",
               nlohmann::json{{"method", to_string(p.method)},
                              {"columns", {"t", "re_gamma", "im_gamma", "err_estimate"}},
                              {"points", pts}}
                       .dump() +
                   "\n");
  }
  const auto& tip = p.gamma.back();
  out << "trace " << d.family() << " (" << to_string(p.method) << ", " << p.t.size()
      << " points): gamma(T) = " << tip.real() << (tip.imag() < 0 ? " - " : " + ")
      << std::abs(tip.imag()) << "i\n";
  return ok;
}

nlohmann::json holder_witness(const Driver& d) {
  const auto pr = d.params();
  const auto lv = monotone_bvlr_levels(pr.at("c").get<double>(), pr.at("alpha").get<double>(),
                                       pr.at("eps").get<double>(), pr.at("scale").get<double>());
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t n = 0; n < lv.s.size(); ++n) {
    const double len = lv.t[n] - lv.s[n];
    rows.push_back({{"n", n}, {"t_minus_s", len}, {"ratio", (d.value(lv.t[n]) - d.value(lv.s[n])) / std::sqrt(len)}});
  }
  return rows;
}

int cmd_check(const Options& o, const Flags& f, std::ostream& out, std::ostream&) {
  if (o.condition != "all" && o.condition != "c1" && o.condition != "c2")
    throw DomainError("--condition must be c1, c2 or all");
  const Driver d = load(o, f);
  write_manifest(o, "check", config_echo(o, f, &d));

  const double tv = d.total_variation(0.0, d.horizon());
  nlohmann::json rep{{"driver", driver_to_json(d)}, {"total_variation", tv}, {"tv_finite", std::isfinite(tv)}};
  std::vector<Verdict> verdicts;
  if (!std::isfinite(tv)) verdicts.push_back(Verdict::fail);
  if (o.condition != "c2") {
    const C1Report c1 = check_c1(d, default_probe_times(d));
    rep["c1"] = to_json(c1);
    verdicts.push_back(c1.verdict);
    out << "(C1) " << to_string(c1.verdict) << ", max estimate " << c1.max_estimate << "\n";
  }
  if (o.condition != "c1") {
    const C2Report c2 = check_c2(d);
    rep["c2"] = to_json(c2);
    verdicts.push_back(c2.verdict);
    out << "(C2) " << to_string(c2.verdict);
    if (c2.reason != FailReason::none) out << " (" << to_string(c2.reason) << ")";
    if (c2.divergent_at) out << " at t=" << *c2.divergent_at;
    out << ", final delta " << c2.final_delta << "\n";
  }
  if (d.family() == "monotone_bvlr") {
    rep["holder_witness"] = holder_witness(d);
    const auto& last = rep["holder_witness"].back();
    out << "1/2-Hoelder witness: (U(t_n) - U(s_n)) / sqrt(t_n - s_n) = " << last["ratio"].get<double>()
        << " at n = " << last["n"].get<std::size_t>() << ", growing without bound\n";
  }
  int code = ok;
  for (Verdict v : verdicts) {
    if (v == Verdict::fail) code = check_fail;
    if (v == Verdict::inconclusive && code == ok) code = inconclusive;
  }
  rep["exit_code"] = code;
  write_text(fs::path(o.out_dir) / "check.json", rep.dump(2) + "\n");
  return code;
}

int cmd_derivative(const Options& o, const Flags& f, std::ostream& out, std::ostream& err) {
  const Driver d = load(o, f);
  std::vector<double> t0s = o.t0s;
  if (t0s.empty())
    for (int k = 1; k <= 8; ++k) t0s.push_back(d.horizon() * k / 8);
  nlohmann::json config = config_echo(o, f, &d);
  config["t0"] = t0s;
  config["fd_h"] = o.fd_h;
  write_manifest(o, "derivative", config);

  RegularityConfig rc;
  rc.solver = solver_config(o, f);
  rc.force = o.force;
  const DerivativeReport r = derivative_report(d, t0s, o.fd_h, rc);
  const fs::path dir(o.out_dir);
  if (wants(o, "csv", true)) write_text(dir / "derivative.csv", derivative_csv(r));
  if (wants(o, "json", false)) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
      nlohmann::json j{{"t0", row.t0}, {"fd", {row.fd.real(), row.fd.imag()}}, {"divergent", row.divergent}};
      if (!row.divergent) {
        j["analytic"] = {row.analytic.real(), row.analytic.imag()};
        j["rel_err"] = row.rel_err;
      }
      rows.push_back(j);
    }
    write_text(dir / "derivative.json",
               nlohmann::json{{"c2", to_string(r.c2)}, {"c2_reason", to_string(r.c2_reason)}, {"rows", rows}}.dump(2) + "\n");
  }
  int code = ok;
  for (const auto& row : r.rows) {
    if (row.divergent) {
      err << "divergent singular integral at t0=" << row.t0 << "\n";
      code = check_fail;
    } else {
      out << "t0=" << row.t0 << "  theta'+ = " << row.analytic.real() << " + " << row.analytic.imag()
          << "i  fd rel err " << row.rel_err << "\n";
    }
  }
  return code;
}

int cmd_validate(const Options& o, const Flags& f, CLI::App* sub, std::ostream& out) {
  ValidationOptions vo;
  vo.solver = solver_config(o, f);
  if (sub->get_option("--n")->count()) vo.grid_points = o.n;
  for (const auto& k : o.only) vo.only.insert(k);
  write_manifest(o, "validate", config_echo(o, f, nullptr));
  const auto results = run_validation(vo);
  nlohmann::json rep = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    out << format_result(r) << "\n";
    rep.push_back(to_json(r));
    all = all && r.pass();
  }
  write_text(fs::path(o.out_dir) / "validation.json", rep.dump(2) + "\n");
  return all ? ok : check_fail;
}

int cmd_sweep(const Options& o, const Flags& f, std::ostream& out) {
  const Driver d = load(o, f);
  PerturbationExperiment e{d};
  e.kind = perturbation_from_string(o.perturbation);
  if (!o.magnitudes.empty()) e.magnitudes = o.magnitudes;
  if (f.seed->count()) e.seed = o.seed;
  nlohmann::json config = config_echo(o, f, &d);
  config["perturbation"] = o.perturbation;
  config["magnitudes"] = e.magnitudes;
  write_manifest(o, "sweep", config);

  SweepConfig sc;
  sc.grid_points = o.n;
  sc.trace.solver = solver_config(o, f);
  sc.trace.force = o.force;
  const SweepReport r = run_perturbation_sweep(e, sc);
  const fs::path dir(o.out_dir);
  if (wants(o, "csv", true)) write_text(dir / "sweep.csv", sweep_csv(r));
  if (wants(o, "json", false)) {
    nlohmann::json j = to_json(r);
    std::vector<Driver> family{d};
    for (double m : e.magnitudes) family.push_back(perturbed_driver(e, m));
    j["equicontinuity"] = to_json(equicontinuity_profile(family));
    write_text(dir / "sweep.json", j.dump(2) + "\n");
  }
  for (const auto& g : r.rungs) {
    out << "magnitude " << g.magnitude << "  tv " << g.tv_dist << "  sup " << g.sup_dist;
    if (g.skipped)
      out << "  skipped: " << g.note << "\n";
    else
      out << "  trace " << g.trace_dist << "\n";
  }
  out << "sweep (" << to_string(r.mode) << " mode): " << (r.decreasing ? "decreasing" : "not decreasing")
      << ", final " << r.final_trace_dist << "\n";
  return r.decreasing && r.final_below_tolerance ? ok : check_fail;
}

int cmd_gallery_list(const Options& o, std::ostream& out) {
  write_manifest(o, "gallery-list", nlohmann::json{{"out", o.out_dir}});
  for (const auto& e : gallery_entries())
    out << e.name << (e.bv_lr ? "  [BV_LR]" : "") << "\n    " << e.description << "\n    defaults "
        << e.defaults.dump() << "\n";
  return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traces of chordal Loewner chains driven by bounded-variation functions", "loewner"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Options o;
  // Option handles per subcommand; only the parsed one is consulted.
  Flags ft, fc, fd, fv, fw;
  auto* trace = app.add_subcommand("trace", "compute the trace on a uniform grid");
  add_driver_source(trace, o, ft);
  add_common(trace, o, ft);
  trace->add_option("--method", o.method, "per-anchor or incremental")
      ->check(CLI::IsMember({"per-anchor", "incremental"}));
  trace->add_flag("--sqrt-time", o.sqrt_time, "add a sqrt(t) column to the CSV");

  auto* check = app.add_subcommand("check", "check (C1) and (C2)");
  add_driver_source(check, o, fc);
  add_common(check, o, fc, false);
  check->add_option("--condition", o.condition, "c1, c2 or all");

  auto* deriv = app.add_subcommand("derivative", "right derivative of phi_t^t(0) against finite differences");
  add_driver_source(deriv, o, fd);
  add_common(deriv, o, fd, false);
  deriv->add_option("--t0", o.t0s, "anchor times")->delimiter(',');
  deriv->add_option("--fd-h", o.fd_h, "finite-difference step")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  add_common(validate, o, fv);
  validate->add_option("--only", o.only, "subset of checks")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "perturbation sweep of trace distances");
  add_driver_source(sweep, o, fw);
  add_common(sweep, o, fw);
  sweep->add_option("--perturbation", o.perturbation, "bump, jitter or mollify");
  sweep->add_option("--magnitudes", o.magnitudes, "strictly decreasing magnitudes")->delimiter(',');

  auto* list = app.add_subcommand("gallery-list", "list example drivers");
  list->add_option("--out", o.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  try {
    if (o.threads > 0) set_max_threads(o.threads);
    if (*trace) return cmd_trace(o, ft, out, err);
    if (*check) return cmd_check(o, fc, out, err);
    if (*deriv) return cmd_derivative(o, fd, out, err);
    if (*validate) return cmd_validate(o, fv, validate, out);
    if (*sweep) return cmd_sweep(o, fw, out);
    if (*list) return cmd_gallery_list(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return input_error;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const NonConvergence& e) {
    err << "nonconvergence: " << e.what() << "\n";
    return nonconvergence;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return nonconvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  }
  return input_error;
}

}  // namespace loewner::cli
