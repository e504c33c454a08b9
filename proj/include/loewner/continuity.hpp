#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/conditions.hpp"
#include "loewner/driver.hpp"
#include "loewner/trace.hpp"

namespace loewner {

enum class Perturbation { bump, jitter, mollify };
std::string to_string(Perturbation p);
Perturbation perturbation_from_string(const std::string& s);

/// Which topology a sweep exercises: TV distance, or uniform distance with equicontinuous
/// variation profiles.
enum class SweepMode { tv, uniform };
std::string to_string(SweepMode m);

struct PerturbationExperiment {
  Driver base;
  Perturbation kind = Perturbation::bump;
  /// Strictly decreasing. bump/jitter: TV size of the perturbation; mollify: window width.
  std::vector<double> magnitudes{1e-1, 1e-2, 1e-3, 1e-4};
  std::uint64_t seed = 1;
  double bump_start = 0.25;
  double bump_width = 0.5;  // both relative to the horizon
  int jitter_knots = 64;
};

SweepMode default_mode(Perturbation p);

/// The rung driver for one magnitude.
Driver perturbed_driver(const PerturbationExperiment& exp, double magnitude);

struct SweepRung {
  double magnitude = 0.0;
  double tv_dist = 0.0;
  double sup_dist = 0.0;
  double trace_dist = 0.0;
  bool skipped = false;  // perturbed driver failed (C1)
  std::string note;
};

struct SweepReport {
  Perturbation kind = Perturbation::bump;
  SweepMode mode = SweepMode::tv;
  std::vector<SweepRung> rungs;
  bool decreasing = false;       // trace distances non-increasing up to noise_floor
  double final_trace_dist = 0.0;
  bool final_below_tolerance = false;
  double tolerance = 0.0;
  double noise_floor = 0.0;
};

struct SweepConfig {
  TraceConfig trace;
  int grid_points = 128;
  double tolerance = 1e-3;
  /// Distances under this are treated as equal when judging monotonicity.
  double noise_floor = 1e-8;
};

/// Per-anchor traces of the base and of every rung on one uniform grid; rungs run in parallel.
SweepReport run_perturbation_sweep(const PerturbationExperiment& exp, const SweepConfig& cfg = {},
                                   Exec exec = Exec::parallel);

/// |U - V|_TV on [0, T] and sup |U - V| on a fine grid plus breakpoints.
double tv_distance(const Driver& u, const Driver& v);
double sup_distance(const Driver& u, const Driver& v, int samples = 4096);

struct EquicontinuityReport {
  std::vector<double> h;
  std::vector<double> modulus;                 // sup_n sup_s V_n(s + h) - V_n(s)
  std::vector<std::vector<double>> member;     // per driver, same h ladder
  std::vector<double> total_variation;         // per driver
  bool bounded = true;                         // no member's TV explodes
  std::vector<std::size_t> exploding;          // indices flagged
};

/// Shared modulus of the variation profiles s -> V_n(s). A member whose total variation
/// exceeds explode_factor times the family median is flagged.
EquicontinuityReport equicontinuity_profile(std::span<const Driver> drivers,
                                            std::span<const double> h_ladder = {},
                                            int s_samples = 512, double explode_factor = 10.0);

/// CSV: magnitude, tv_dist, sup_dist, trace_dist (skipped rungs carry nan).
std::string sweep_csv(const SweepReport& r);

nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const EquicontinuityReport& r);

}  // namespace loewner
