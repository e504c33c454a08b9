#include "loewner/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "loewner/conditions.hpp"
#include "loewner/continuity.hpp"
#include "loewner/errors.hpp"
#include "loewner/forward.hpp"
#include "loewner/gallery.hpp"
#include "loewner/regularity.hpp"
#include "loewner/trace.hpp"

namespace loewner {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

TraceConfig trace_config(const ValidationOptions& o) {
  TraceConfig tc;
  tc.solver = o.solver;
  tc.exec = o.exec;
  return tc;
}

void check_slit(const ValidationOptions& o, CheckResult& r) {
  const Driver d = make_example("zero");
  const auto grid = uniform_grid(1.0, o.grid_points);
  const TracePath p = trace_per_anchor(d, grid, trace_config(o));
  double gerr = 0.0, terr = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    gerr = std::max(gerr, std::abs(p.gamma[k] - cplx(0.0, 2.0 * std::sqrt(grid[k]))));
    terr = std::max(terr, std::abs(p.theta[k] + 4.0 * grid[k]));
  }
  r.value = gerr;
  r.tolerance = 1e-6;
  r.value_ok = gerr <= 1e-6 && terr <= 1e-10;
  r.detail = {{"gamma_err", gerr}, {"theta_err", terr}, {"theta_tol", 1e-10}};
}

void check_envelope(const ValidationOptions& o, CheckResult& r) {
  constexpr double slack = 1e-4;
  double worst = -std::numeric_limits<double>::infinity();
  nlohmann::json rows = nlohmann::json::array();
  for (double c : {0.5, 1.0, 1.9}) {
    const Driver d = make_example("sqrt", {{"c", c}});
    for (double t : {0.5, 1.0}) {
      const ReversedIncrement b = reversed_increment(d, t);
      const PhiPath p = solve_phi_zero(b, o.solver);
      const double delta = p.ladder.delta;
      const double lower_c = std::sqrt(std::max(0.0, 4.0 - delta * delta));
      double excess = -std::numeric_limits<double>::infinity();
      std::size_t checked = 0;
      for (std::size_t k = 1; k < p.size(); ++k) {
        const double s = p.s[k];
        if (s > p.ladder.certified_prefix) break;
        const double rs = std::sqrt(s);
        const double y = p.a[k].imag(), x = std::abs(p.a[k].real());
        excess = std::max({excess, (lower_c * rs - slack) - y, y - (2.0 * rs + slack),
                           x - (b.variation(s) + slack)});
        ++checked;
      }
      worst = std::max(worst, excess);
      rows.push_back({{"c", c},
                      {"anchor", t},
                      {"delta", delta},
                      {"certified_prefix", p.ladder.certified_prefix},
                      {"nodes", checked},
                      {"max_excess", excess}});
    }
  }
  r.value = worst;
  r.tolerance = 0.0;
  r.value_ok = worst <= 0.0;
  r.detail = {{"runs", rows}, {"slack", slack}};
}

void check_ladder(const ValidationOptions& o, CheckResult& r) {
  const Driver d = make_example("sqrt");
  const ReversedIncrement b = reversed_increment(d, 1.0);
  std::vector<double> stops;
  for (int k = 1; k < 64; ++k) stops.push_back(k / 64.0);

  auto solve = [&](double ratio) {
    SolverConfig cfg = o.solver;
    cfg.ladder.clear();
    for (int k = 1; k <= 20; ++k) cfg.ladder.push_back(std::pow(ratio, -k));
    cfg.cauchy_tol = 1e-6;
    return solve_phi_zero(b, cfg, stops);
  };
  const PhiPath two = solve(2.0);
  const PhiPath three = solve(3.0);

  const auto& diffs = two.ladder.diffs;
  // Eventually decreasing: the last three differences strictly shrink.
  bool decreasing = diffs.size() >= 3;
  for (std::size_t k = diffs.size() >= 3 ? diffs.size() - 2 : 1; k < diffs.size(); ++k)
    decreasing = decreasing && diffs[k] < diffs[k - 1];
  double agree = std::abs(two.end_phi() - three.end_phi());
  for (double s : stops) agree = std::max(agree, std::abs(two.phi_at(s) - three.phi_at(s)));

  r.value = diffs.empty() ? std::numeric_limits<double>::infinity() : diffs.back();
  r.tolerance = 1e-6;
  r.value_ok = two.ladder.converged && r.value <= 1e-6 && two.ladder.y.size() <= 20 &&
               decreasing && agree <= 2e-6;
  r.detail = {{"rungs", two.ladder.y.size()},
              {"diffs", diffs},
              {"decreasing", decreasing},
              {"ladder3_rungs", three.ladder.y.size()},
              {"ladder_agreement", agree},
              {"agreement_tol", 2e-6}};
}

void check_roundtrip(const ValidationOptions& o, CheckResult& r) {
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::object();
  for (const char* name : {"zero", "sqrt", "logsqrt"}) {
    const Driver d = make_example(name);
    const TracePath p = trace_per_anchor(d, uniform_grid(1.0, o.grid_points), trace_config(o));
    const RoundtripReport rep = roundtrip_residual(d, p, {}, {}, o.exec);
    worst = std::max(worst, rep.max_residual);
    rows[name] = {{"max_residual", rep.max_residual}, {"samples", rep.points.size()}};
  }
  r.value = worst;
  r.tolerance = 1e-3;
  r.value_ok = worst <= 1e-3;
  r.detail = rows;
}

void check_hcap(const ValidationOptions&, CheckResult& r) {
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (const Driver& d : bvlr_gallery())
    for (double t : {0.25, 0.5, 1.0}) {
      const HcapReport h = hcap_estimate(d, t);
      worst = std::max(worst, std::abs(h.half - t));
      rows.push_back({{"driver", d.family()}, {"t", t}, {"half_b", h.half}, {"fit_residual", h.fit_residual}});
    }
  r.value = worst;
  r.tolerance = 1e-3;
  r.value_ok = worst <= 1e-3;
  r.detail = rows;
}

void check_flow(const ValidationOptions& o, CheckResult& r) {
  const Driver d = make_example("sqrt");
  const double t = 0.5;
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> h{0.05, 0.1, 0.2, 0.3, 0.5};
  std::vector<double> defect(s.size() * h.size());
  for_each_index(o.exec, defect.size(), [&](std::size_t k) {
    defect[k] = flow_property_defect(d, t, s[k / h.size()], h[k % h.size()], o.solver);
  });
  r.value = *std::max_element(defect.begin(), defect.end());
  r.tolerance = 1e-5;
  r.value_ok = r.value <= 1e-5;
  r.detail = {{"t", t}, {"s", s}, {"h", h}, {"defects", defect}};
}

void check_derivative(const ValidationOptions& o, CheckResult& r) {
  RegularityConfig rc;
  rc.solver = o.solver;
  nlohmann::json at_zero = nlohmann::json::array();
  double zero_err = 0.0;
  int c2_drivers = 0;
  for (const Driver& d : bvlr_gallery()) {
    const C2Report c2 = check_c2(d, {}, o.exec);
    if (c2.verdict != Verdict::pass) continue;
    ++c2_drivers;
    const cplx v = theta_derivative(d, 0.0, rc);
    zero_err = std::max(zero_err, std::abs(v + 4.0));
    at_zero.push_back({{"driver", d.family()}, {"re", v.real()}, {"im", v.imag()}});
  }
  const Driver d = make_example("sqrt");
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (double t0 : {0.25, 0.5, 1.0}) {
    const cplx a = theta_derivative(d, t0, rc);
    const cplx fd = fd_theta_derivative(d, t0, 1e-3, o.solver);
    const double rel = std::abs(a - fd) / std::abs(a);
    worst = std::max(worst, rel);
    rows.push_back({{"t0", t0}, {"analytic", {a.real(), a.imag()}}, {"fd", {fd.real(), fd.imag()}}, {"rel_err", rel}});
  }
  r.value = worst;
  r.tolerance = 1e-2;
  r.value_ok = worst <= 1e-2 && zero_err <= 1e-6 && c2_drivers > 0;
  r.detail = {{"theta_prime_at_zero", at_zero}, {"zero_err", zero_err}, {"sqrt_fd", rows}};
}

void check_c2_failure(const ValidationOptions& o, CheckResult& r) {
  const Driver d = make_example("spiral");
  const C2Report c2 = check_c2(d, {}, o.exec);
  const bool divergent = c2.verdict == Verdict::fail && c2.reason == FailReason::divergent;
  bool threw = false;
  try {
    RegularityConfig rc;
    rc.solver = o.solver;
    theta_derivative(d, 1.0, rc);
  } catch (const DivergentIntegral&) {
    threw = true;
  }
  std::vector<double> scales;
  for (int k = 2; k <= 40; ++k) scales.push_back(std::ldexp(1.0, -k));
  const SmallnessReport small = holder_smallness(d, 1.0, scales);
  const int failures = int(!divergent) + int(!threw) + int(!small.holds);
  r.value = failures;
  r.tolerance = 0.0;
  r.value_ok = failures == 0;
  r.detail = {{"c2_verdict", to_string(c2.verdict)},
              {"c2_reason", to_string(c2.reason)},
              {"theta_derivative_threw", threw},
              {"smallness_holds", small.holds}};
  if (c2.divergent_at) r.detail["divergent_at"] = *c2.divergent_at;
}

void check_xy(const ValidationOptions& o, CheckResult& r) {
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::object();
  for (const char* name : {"zero", "sqrt", "logsqrt"}) {
    const ReversedIncrement b = reversed_increment(make_example(name), 1.0);
    const XYReport x = xy_identity_check(solve_phi_zero(b, o.solver), b);
    worst = std::max(worst, x.max_normalized);
    rows[name] = {{"max_residual", x.max_residual},
                  {"max_normalized", x.max_normalized},
                  {"max_re_excess", x.max_re_excess}};
  }
  r.value = worst;
  r.tolerance = 1e-6;
  r.value_ok = worst <= 1e-6;
  r.detail = rows;
}

void check_continuity(const ValidationOptions& o, CheckResult& r) {
  PerturbationExperiment e{make_example("sqrt")};
  e.kind = Perturbation::bump;
  e.magnitudes = {1e-1, 1e-2, 1e-3, 1e-4};
  SweepConfig sc;
  sc.trace = trace_config(o);
  sc.grid_points = o.grid_points;
  const SweepReport rep = run_perturbation_sweep(e, sc, o.exec);
  r.value = rep.final_trace_dist;
  r.tolerance = 1e-3;
  r.value_ok = rep.final_below_tolerance && rep.decreasing;
  r.detail = to_json(rep);
}

void check_methods(const ValidationOptions& o, CheckResult& r) {
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::object();
  const auto grid = uniform_grid(1.0, o.grid_points);
  for (const Driver& d : bvlr_gallery()) {
    const double dist = max_distance(trace_per_anchor(d, grid, trace_config(o)),
                                     trace_incremental(d, grid, trace_config(o)));
    worst = std::max(worst, dist);
    rows[d.family()] = dist;
  }
  // Timing fit: least squares slope of log(time) against log(N), serial to measure the work.
  const Driver d = make_example("sqrt");
  TraceConfig tc = trace_config(o);
  tc.exec = Exec::serial;
  std::vector<double> lx, ly;
  nlohmann::json timings = nlohmann::json::array();
  for (int n : o.scaling_sizes) {
    const auto g = uniform_grid(1.0, n);
    const auto t0 = Clock::now();
    trace_incremental(d, g, tc);
    const double sec = seconds_since(t0);
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(sec));
    timings.push_back({{"n", n}, {"seconds", sec}});
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) mx += lx[k], my += ly[k];
  mx /= double(lx.size());
  my /= double(lx.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const double exponent = sxx > 0 ? sxy / sxx : 0.0;
  r.value = worst;
  r.tolerance = 1e-5;
  r.value_ok = worst <= 1e-5 && exponent >= 1.7 && exponent <= 2.3;
  r.detail = {{"distance", rows}, {"timings", timings}, {"exponent", exponent}, {"exponent_range", {1.7, 2.3}}};
}

void check_simple(const ValidationOptions& o, CheckResult& r) {
  double worst = std::numeric_limits<double>::infinity();
  nlohmann::json rows = nlohmann::json::object();
  const auto grid = uniform_grid(1.0, o.grid_points);
  bool all = true;
  for (const Driver& d : bvlr_gallery()) {
    const SimplenessReport s = simpleness_check(trace_per_anchor(d, grid, trace_config(o)), 0.5, o.exec);
    all = all && s.pass;
    worst = std::min(worst, s.min_ratio);
    rows[d.family()] = {{"min_ratio", s.min_ratio}, {"pass", s.pass}};
  }
  r.value = worst;
  r.tolerance = 0.5;
  r.at_least = true;
  r.value_ok = all && worst >= 0.5;
  r.detail = rows;
}

struct Entry {
  CheckInfo info;
  double budget;
  std::function<void(const ValidationOptions&, CheckResult&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e{
      {{1, "slit", "vertical slit exactness"}, 1, check_slit},
      {{2, "envelope", "a-priori envelopes for sqrt(c)"}, 10, check_envelope},
      {{3, "ladder", "regularization ladder convergence"}, 10, check_ladder},
      {{4, "roundtrip", "forward roundtrip g_t(gamma_t) = U_t"}, 60, check_roundtrip},
      {{5, "hcap", "half-plane capacity normalization"}, 30, check_hcap},
      {{6, "flow", "flow property"}, 10, check_flow},
      {{7, "derivative", "trace derivative formula"}, 30, check_derivative},
      {{8, "c2-failure", "(C2) failure of the spiral"}, 10, check_c2_failure},
      {{9, "xy", "X*Y identity"}, 10, check_xy},
      {{10, "continuity", "continuity sweep under bump perturbations"}, 120, check_continuity},
      {{11, "methods", "per-anchor vs incremental, quadratic cost"}, 120, check_methods},
      {{12, "simple", "simpleness of gallery traces"}, 10, check_simple},
  };
  return e;
}

}  // namespace

const std::vector<CheckInfo>& validation_checks() {
  static const std::vector<CheckInfo> info = [] {
    std::vector<CheckInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return info;
}

std::vector<CheckResult> run_validation(const ValidationOptions& opts) {
  for (const auto& k : opts.only) {
    bool known = false;
    for (const auto& e : entries()) known = known || e.info.key == k;
    if (!known) throw DomainError("unknown validation check '" + k + "'");
  }
  std::vector<CheckResult> out;
  for (const auto& e : entries()) {
    if (!opts.only.empty() && !opts.only.count(e.info.key)) continue;
    CheckResult r;
    r.id = e.info.id;
    r.key = e.info.key;
    r.title = e.info.title;
    r.budget = e.budget;
    const auto t0 = Clock::now();
    try {
      e.run(opts, r);
    } catch (const std::exception& ex) {
      r.value_ok = false;
      r.message = ex.what();
    }
    r.seconds = seconds_since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CheckResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s [%2d] %-11s value=%-12.4g %s %-8.3g time=%.2fs/%.0fs  %s",
                r.pass() ? "PASS" : "FAIL", r.id, r.key.c_str(), r.value, r.at_least ? ">=" : "<=",
                r.tolerance, r.seconds, r.budget, r.title.c_str());
  std::string s = buf;
  if (!r.message.empty()) s += "  error: " + r.message;
  return s;
}

nlohmann::json to_json(const CheckResult& r) {
  nlohmann::json j{{"id", r.id},
                   {"name", r.key},
                   {"title", r.title},
                   {"value", r.value},
                   {"tolerance", r.tolerance},
                   {"relation", r.at_least ? ">=" : "<="},
                   {"verdict", r.pass() ? "pass" : "fail"},
                   {"seconds", r.seconds},
                   {"budget", r.budget},
                   {"detail", r.detail}};
  if (!r.message.empty()) j["error"] = r.message;
  return j;
}

}  // namespace loewner
