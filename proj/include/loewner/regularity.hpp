#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/conditions.hpp"
#include "loewner/reverse_solver.hpp"
#include "loewner/trace.hpp"

namespace loewner {

struct RegularityConfig {
  SolverConfig solver;
  /// Skip the local divergence test at t0.
  bool force = false;
  int divergence_decades = 14;
  int divergence_cells = 48;
};

/// theta'_+(t0) = -4 exp(int_0^t0 dbeta^t0 / sqrt(phi^t0)), theta_t = phi_t^t(0); exactly -4 at
/// t0 = 0. Throws DivergentIntegral when the r^{-1/2} tail test at t0 diverges.
cplx theta_derivative(const Driver& d, double t0, const RegularityConfig& cfg = {});

/// Z_s^t0 = exp(int_0^s dbeta^t0 / sqrt(phi^t0)), the derivative of phi_s^t0(w) at w = 0.
cplx z_factor(const Driver& d, double t0, double s, const RegularityConfig& cfg = {});

/// The defining ratio (phi_{s+h}^{t0+h}(0) - phi_s^{t0}(0)) / phi_h^{t0+h}(0). Needs t0 + h <= T.
cplx z_ratio(const Driver& d, double t0, double s, double h, const SolverConfig& cfg = {});

/// One-sided difference of theta = phi_t^t(0): to the right when t0 + h <= T, else to the left.
/// Richardson-extrapolated over h, h/2, h/4.
cplx fd_theta_derivative(const Driver& d, double t0, double h, const SolverConfig& cfg = {});

/// Flow-property defect |phi_{s+h}^{t+h}(0) - phi_s^t(phi_h^{t+h}(0))|.
double flow_property_defect(const Driver& d, double t, double s, double h,
                            const SolverConfig& cfg = {});

/// t_j = T (j / (n - 1))^2: uniform in sqrt(t).
std::vector<double> sqrt_grid(double horizon, int n);

struct TangentReport {
  std::vector<double> s;      // sqrt(t) at segment midpoints
  std::vector<double> angle;  // unwrapped direction of each chord of s -> gamma(s^2)
  double max_jump = 0.0;      // largest change between adjacent chords
  double total_turning = 0.0; // sum of |angle changes|
};

/// Discrete tangent directions of s -> gamma(s^2). The direction of a chord does not depend
/// on the parametrization; what matters is that the grid is uniform in s, see sqrt_grid().
TangentReport tangent_of_sqrt_parametrization(const TracePath& p);

/// Total turning of the chords with t in [t_lo, t_hi].
double turning_between(const TangentReport& r, double t_lo, double t_hi);

struct DerivativeRow {
  double t0 = 0.0;
  cplx analytic;
  cplx fd;
  double rel_err = 0.0;
  bool divergent = false;  // analytic value unavailable
};

struct DerivativeReport {
  std::vector<DerivativeRow> rows;
  Verdict c2 = Verdict::inconclusive;
  FailReason c2_reason = FailReason::none;
};

DerivativeReport derivative_report(const Driver& d, std::span<const double> t0s, double fd_h,
                                   const RegularityConfig& cfg = {}, Exec exec = Exec::parallel);

/// CSV: t0, re_analytic, im_analytic, re_fd, im_fd, rel_err, c2_flag.
std::string derivative_csv(const DerivativeReport& r);

}  // namespace loewner
