#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/driver.hpp"
#include "loewner/parallel.hpp"

namespace loewner {

enum class Verdict { pass, fail, inconclusive };
/// Why (C2) failed: the singular integral is infinite at some anchor, or it is finite
/// everywhere but does not shrink uniformly (e.g. c sqrt(t), where it plateaus at c pi / 2).
enum class FailReason { none, divergent, non_vanishing };

std::string to_string(Verdict v);
std::string to_string(FailReason r);

// ---- (C1) ----

struct C1Options {
  double q = 0.5;        // ladder ratio, scales s0 q^k with s0 = probe time
  int levels = 40;
  int tail = 4;          // estimate = max ratio over this many smallest admissible scales
  double margin = 0.05;
  /// Scales below max(floor, driver resolution at t) are discarded. The driver resolution is
  /// the left knot spacing for sampled drivers: below it only the interpolant is seen.
  double floor = 0.0;
};

struct C1Probe {
  double t = 0.0;
  Verdict verdict = Verdict::inconclusive;
  double estimate = 0.0;
  double floor = 0.0;
  bool floor_limited = false;  // the ladder was cut at the sample resolution
  std::vector<double> scales;  // admissible scales, decreasing
  std::vector<double> ratios;  // (V(t) - V(t - s)) / sqrt(s)
};

struct C1Report {
  std::vector<C1Probe> probes;
  Verdict verdict = Verdict::pass;
  double max_estimate = 0.0;
};

C1Report check_c1(const Driver& d, std::span<const double> probe_times, const C1Options& opts = {},
                  Exec exec = Exec::parallel);
/// k T / n for k = 1..n.
std::vector<double> default_probe_times(const Driver& d, int n = 64);

// ---- (C2) ----

struct C2Options {
  std::vector<double> eps_ladder;  // decreasing; empty means T 2^-k, k = 1..24
  std::vector<double> t_grid;      // empty means 64 uniform points and T 2^-k, k = 1..24
  double tolerance = 0.1;
  int graded_cells = 32;           // quadratic grading r_k = (k/K)^2 eps per ladder rung
  int decades = 14;                // inner cutoff of the divergence test: t 10^-decades
  int cells_per_decade = 48;
};

struct C2Point {
  double eps;
  double delta;     // max over the t-grid of the integral up to min(eps, t)
  double argmax_t;
};

/// Per-decade pieces D_m of the integral over [t 10^-(m+1), t 10^-m] and the verdict of the
/// tail test: ratios D_{m+1} / D_m creeping up towards 1 mean a divergent (log-type) tail,
/// ratios settling at a constant below 1 mean a geometric, convergent tail.
struct DivergenceProbe {
  double t = 0.0;
  std::vector<double> decade_pieces;
  std::vector<double> noise;   // round-off bound of each piece
  std::vector<double> ratios;  // consecutive ratios, stopped at the first piece lost in noise
  bool divergent = false;
};

struct C2Report {
  std::vector<C2Point> curve;  // in ladder order (eps decreasing)
  std::vector<double> t_grid;
  Verdict verdict = Verdict::inconclusive;
  FailReason reason = FailReason::none;
  std::optional<double> divergent_at;
  double final_delta = 0.0;
  double tolerance = 0.0;
};

C2Report check_c2(const Driver& d, const C2Options& opts = {}, Exec exec = Exec::parallel);

/// Integral of r^{-1/2} d|beta^t|_r over [0, min(eps, t)] by product integration on a
/// quadratically graded mesh (exact cell weights for piecewise-linear variation).
double c2_integral(const Driver& d, double t, double eps, int graded_cells = 256);

/// Tail test at a single anchor.
DivergenceProbe probe_divergence(const Driver& d, double t, int decades = 14,
                                 int cells_per_decade = 48);

// ---- Holder smallness ----

/// |beta|_TV,s <= sqrt(s) sqrt(E(s)) where E(s) is the Dirichlet energy of U on [t - s, t]
/// (Cauchy-Schwarz). Checked along a scale ladder; needs a closed-form energy.
struct SmallnessReport {
  double t = 0.0;
  std::vector<double> scales;
  std::vector<double> variation;  // |beta|_TV,s
  std::vector<double> bound;      // sqrt(s E(s))
  std::vector<double> ratio_to_sqrt;  // |beta|_TV,s / sqrt(s), tends to 0 for the spiral
  bool holds = false;
};
SmallnessReport holder_smallness(const Driver& d, double t, std::span<const double> scales);

nlohmann::json to_json(const C1Report& r);
nlohmann::json to_json(const C2Report& r);
nlohmann::json to_json(const SmallnessReport& r);

}  // namespace loewner
