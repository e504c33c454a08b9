#include "loewner/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "loewner/errors.hpp"

namespace loewner {

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::bump: return "bump";
    case Perturbation::jitter: return "jitter";
    case Perturbation::mollify: return "mollify";
  }
  return "?";
}

Perturbation perturbation_from_string(const std::string& s) {
  if (s == "bump") return Perturbation::bump;
  if (s == "jitter") return Perturbation::jitter;
  if (s == "mollify") return Perturbation::mollify;
  throw DomainError("unknown perturbation '" + s + "' (bump, jitter, mollify)");
}

std::string to_string(SweepMode m) { return m == SweepMode::tv ? "tv" : "uniform"; }

SweepMode default_mode(Perturbation p) {
  return p == Perturbation::mollify ? SweepMode::uniform : SweepMode::tv;
}

namespace {

// Piecewise-linear offsets at uniform knots, normalised to total variation 1.
std::shared_ptr<const DriverForm> jitter_form(double horizon, int knots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Knot> k{{0.0, 0.0}};
  for (int j = 1; j <= knots; ++j) k.emplace_back(horizon * j / knots, u(rng));
  double tv = 0.0;
  for (std::size_t j = 1; j < k.size(); ++j) tv += std::abs(k[j].second - k[j - 1].second);
  for (auto& [t, v] : k) v /= tv;
  return make_samples_form(std::move(k), "jitter", {{"seed", seed}, {"knots", knots}});
}

}  // namespace

Driver perturbed_driver(const PerturbationExperiment& exp, double m) {
  const double T = exp.base.horizon();
  switch (exp.kind) {
    case Perturbation::bump:
      // The sin^2 bump has variation 2.
      return Driver(make_sum_form(exp.base.form_ptr(),
                                  make_bump_form(exp.bump_start * T, exp.bump_width * T), 0.5 * m),
                    T);
    case Perturbation::jitter:
      return Driver(make_sum_form(exp.base.form_ptr(), jitter_form(T, exp.jitter_knots, exp.seed), m), T);
    case Perturbation::mollify:
      return Driver(make_mollified_form(exp.base.form_ptr(), m * T), T);
  }
  throw DomainError("unknown perturbation");
}

double tv_distance(const Driver& u, const Driver& v) {
  const auto diff = make_sum_form(v.form_ptr(), u.form_ptr(), -1.0);
  return refined_variation(*diff, 0.0, std::min(u.horizon(), v.horizon()), diff->breakpoints(), 1e-10);
}

double sup_distance(const Driver& u, const Driver& v, int samples) {
  const double T = std::min(u.horizon(), v.horizon());
  std::vector<double> ts;
  for (int k = 0; k <= samples; ++k) ts.push_back(T * k / samples);
  for (double b : u.breakpoints()) ts.push_back(b);
  for (double b : v.breakpoints()) ts.push_back(b);
  double m = 0.0;
  for (double t : ts)
    if (t <= T) m = std::max(m, std::abs(u.value(t) - v.value(t)));
  return m;
}

SweepReport run_perturbation_sweep(const PerturbationExperiment& exp, const SweepConfig& cfg,
                                   Exec exec) {
  for (std::size_t k = 1; k < exp.magnitudes.size(); ++k)
    if (!(exp.magnitudes[k] < exp.magnitudes[k - 1])) throw DomainError("sweep magnitudes must strictly decrease");

  SweepReport r;
  r.kind = exp.kind;
  r.mode = default_mode(exp.kind);
  r.tolerance = cfg.tolerance;
  r.noise_floor = cfg.noise_floor;
  const auto grid = uniform_grid(exp.base.horizon(), cfg.grid_points);

  // Rungs run side by side, so each trace runs its anchors serially.
  TraceConfig tc = cfg.trace;
  if (exec == Exec::parallel) tc.exec = Exec::serial;
  const TracePath base = trace_per_anchor(exp.base, grid, cfg.trace);

  r.rungs.resize(exp.magnitudes.size());
  for_each_index(exec, exp.magnitudes.size(), [&](std::size_t k) {
    SweepRung& rung = r.rungs[k];
    rung.magnitude = exp.magnitudes[k];
    const Driver v = perturbed_driver(exp, rung.magnitude);
    rung.tv_dist = tv_distance(exp.base, v);
    rung.sup_dist = sup_distance(exp.base, v);
    const C1Report c1 = check_c1(v, default_probe_times(v), {}, Exec::serial);
    if (c1.verdict == Verdict::fail) {
      rung.skipped = true;
      rung.note = "perturbed driver fails (C1)";
      return;
    }
    try {
      rung.trace_dist = max_distance(base, trace_per_anchor(v, grid, tc));
    } catch (const std::exception& e) {
      rung.skipped = true;
      rung.note = e.what();
    }
  });

  r.decreasing = true;
  const SweepRung* last = nullptr;
  for (const auto& rung : r.rungs) {
    if (rung.skipped) continue;
    if (last && rung.trace_dist > last->trace_dist + cfg.noise_floor) r.decreasing = false;
    last = &rung;
  }
  r.final_trace_dist = last ? last->trace_dist : std::numeric_limits<double>::infinity();
  r.final_below_tolerance = last && !r.rungs.back().skipped && r.final_trace_dist <= cfg.tolerance;
  return r;
}

EquicontinuityReport equicontinuity_profile(std::span<const Driver> drivers,
                                            std::span<const double> h_ladder, int s_samples,
                                            double explode_factor) {
  EquicontinuityReport r;
  if (drivers.empty()) return r;
  const double T = drivers.front().horizon();
  for (const auto& d : drivers)
    if (std::abs(d.horizon() - T) > 1e-12 * T) throw DomainError("equicontinuity_profile needs a shared horizon");
  if (h_ladder.empty())
    for (int k = 1; k <= 12; ++k) r.h.push_back(T * std::ldexp(1.0, -k));
  else
    r.h.assign(h_ladder.begin(), h_ladder.end());

  r.modulus.assign(r.h.size(), 0.0);
  for (const auto& d : drivers) {
    std::vector<double> m(r.h.size(), 0.0);
    for (std::size_t i = 0; i < r.h.size(); ++i) {
      const double h = r.h[i];
      for (int j = 0; j <= s_samples; ++j) {
        const double s = (T - h) * j / s_samples;
        m[i] = std::max(m[i], d.total_variation(s, s + h));
      }
      r.modulus[i] = std::max(r.modulus[i], m[i]);
    }
    r.member.push_back(std::move(m));
    r.total_variation.push_back(d.total_variation(0.0, T));
  }

  std::vector<double> sorted = r.total_variation;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t n = 0; n < drivers.size(); ++n)
    if (r.total_variation[n] > explode_factor * std::max(median, 1.0 / explode_factor) ||
        !std::isfinite(r.total_variation[n])) {
      r.bounded = false;
      r.exploding.push_back(n);
    }
  return r;
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "magnitude,tv_dist,sup_dist,trace_dist\n";
  for (const auto& g : r.rungs) {
    os << g.magnitude << ',' << g.tv_dist << ',' << g.sup_dist << ',';
    if (g.skipped)
      os << "nan";
    else
      os << g.trace_dist;
    os << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const SweepReport& r) {
  nlohmann::json rungs = nlohmann::json::array();
  for (const auto& g : r.rungs) {
    nlohmann::json j{{"magnitude", g.magnitude},
                     {"tv_dist", g.tv_dist},
                     {"sup_dist", g.sup_dist},
                     {"skipped", g.skipped}};
    if (!g.skipped) j["trace_dist"] = g.trace_dist;
    if (!g.note.empty()) j["note"] = g.note;
    rungs.push_back(j);
  }
  return {{"kind", to_string(r.kind)},
          {"mode", to_string(r.mode)},
          {"decreasing", r.decreasing},
          {"final_trace_dist", r.final_trace_dist},
          {"final_below_tolerance", r.final_below_tolerance},
          {"tolerance", r.tolerance},
          {"rungs", rungs}};
}

nlohmann::json to_json(const EquicontinuityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r.h.size(); ++i) rows.push_back({{"h", r.h[i]}, {"modulus", r.modulus[i]}});
  return {{"bounded", r.bounded},
          {"exploding", r.exploding},
          {"total_variation", r.total_variation},
          {"profile", rows}};
}

}  // namespace loewner
