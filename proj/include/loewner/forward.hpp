#pragma once

#include <complex>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/driver.hpp"
#include "loewner/parallel.hpp"
#include "loewner/trace.hpp"

namespace loewner {

struct ForwardConfig {
  // Integration runs in sigma = sqrt(t), where sqrt-type drivers become smooth.
  double rtol = 1e-11;
  double atol = 1e-13;
  /// Upper bound on the time step, as a fraction of the horizon.
  double base_step = 1.0 / 64;
  /// Time step is also capped by step_factor * |g - U|^2.
  double step_factor = 0.05;
  /// Swallowed once |g - U| drops below this and the field 2/|g - U| keeps growing.
  double swallow_tol = 1e-7;
  double min_step = 1e-16;
  long max_steps = 2'000'000;
};

enum class FlowStatus { alive, swallowed };

struct ForwardFlow {
  cplx z;
  std::vector<double> t;
  std::vector<cplx> g;
  FlowStatus status = FlowStatus::alive;
  double swallow_time = 0.0;  // meaningful when swallowed

  cplx end() const { return g.back(); }
};

/// Flow z under dg/dt = 2/(g - U_t) up to t_end (default: the horizon).
/// Throws SolverFailure when the step underflows away from the driver.
ForwardFlow flow_forward(const Driver& d, cplx z, const ForwardConfig& cfg = {},
                         double t_end = -1.0);

struct HcapReport {
  double t = 0.0;
  double b = 0.0;          // g_t(z) = z + b/z + ...
  double half = 0.0;       // b/2, should equal t
  double fit_residual = 0.0;
  double radius = 0.0;
  bool warning = false;    // fit residual above fit_tol
};

/// Least-squares fit of g_t(z) - z = sum_k c_k z^{-k} over a half ring of large |z|.
HcapReport hcap_estimate(const Driver& d, double t, const ForwardConfig& cfg = {},
                         double radius = 100.0, int probes = 24, double fit_tol = 1e-8);

struct RoundtripPoint {
  std::size_t index = 0;
  double t = 0.0;
  std::vector<double> eta;
  std::vector<cplx> raw;   // g_t(z_eta) - U_t
  cplx extrapolated;
  double residual = 0.0;
};

struct RoundtripReport {
  std::vector<RoundtripPoint> points;
  double max_residual = 0.0;
};

struct RoundtripOptions {
  int samples = 16;
  double eta0 = 1e-4;  // relative to |gamma_k|
  double eta_ratio = 0.25;
  int eta_levels = 4;
};

/// Flows gamma_k + eta * tangent forward to t_k and extrapolates g - U to eta = 0 in sqrt(eta).
RoundtripReport roundtrip_residual(const Driver& d, const TracePath& p,
                                   const ForwardConfig& cfg = {},
                                   const RoundtripOptions& opts = {}, Exec exec = Exec::parallel);

nlohmann::json to_json(const HcapReport& r);
nlohmann::json to_json(const RoundtripReport& r);

}  // namespace loewner
