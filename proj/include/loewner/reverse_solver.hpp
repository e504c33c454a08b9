#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "loewner/branch.hpp"
#include "loewner/driver.hpp"

namespace loewner {

using cplx = std::complex<double>;

struct SolverConfig {
  /// Steps are taken in sigma = sqrt(s). Largest sigma-step as a fraction of sqrt(span); in
/// fixed-step mode, the s-step as a fraction of the span.
  double base_step = 1.0 / 8.0;
  /// Seed stops (k / K)^grading * span / 16, k = 1..K, so the output resolves the start.
  double grading = 2.0;
  int graded_points = 16;
  double rtol = 1e-10;
  double atol = 1e-13;  // times the span
  double min_step = 1e-15;  // times the span; below this the solve fails
  long max_steps = 4'000'000;
  double branch_guard = kDefaultBranchGuard;
  /// Integrate h = sqrt(phi) directly once Im h >= hybrid_threshold * sqrt(span).
  bool hybrid = true;
  double hybrid_threshold = 0.25;
  /// false: no error control, graded-then-uniform mesh with step base_step * span.
  bool adaptive = true;

  /// Regularization ladder y_k = y0 sqrt(span) q^k, or the explicit values in `ladder`
  /// (also scaled by sqrt(span)).
  double y0 = 1.0 / 16.0;
  double ladder_q = 0.25;
  int max_rungs = 40;
  std::vector<double> ladder;
  /// Cauchy stop: sup-norm difference of consecutive rungs <= cauchy_tol * span.
  double cauchy_tol = 1e-10;
};

/// Data recorded by solve_phi_zero.
struct LadderInfo {
  std::vector<double> y;      // rungs actually computed (absolute, already scaled)
  std::vector<double> diffs;  // diffs[k] = sup |phi^(y_k) - phi^(y_{k+1})|
  bool converged = false;
  /// sup over mesh nodes of |beta|_TV,s / sqrt(s) on certified_prefix, and that prefix: the
  /// longest initial piece of the mesh on which the ratio stays below 2.
  double delta = 0.0;
  double certified_prefix = 0.0;
};

/// Discrete solution of phi_s = w + 2 int_0^s sqrt(phi) dbeta - 4 s on [0, span].
/// Node k carries s, phi, the branch root a (Im a >= 0), beta(s) and the local error of the
/// step ending there; step k (nodes k -> k+1) also records its midpoint state.
struct PhiPath {
  double anchor = 0.0;
  double span = 0.0;
  cplx start{};
  std::vector<double> s;
  std::vector<cplx> phi;
  std::vector<cplx> a;
  std::vector<double> beta;
  std::vector<double> local_err;
  std::vector<double> mid_s;  // midpoint in sigma = sqrt(s) of each step
  std::vector<cplx> mid_phi;
  std::vector<cplx> mid_a;
  std::vector<double> mid_beta;
  LadderInfo ladder;  // empty unless produced by solve_phi_zero

  std::size_t size() const noexcept { return s.size(); }
  cplx end_phi() const { return phi.back(); }
  cplx end_sqrt() const { return a.back(); }
  /// phi at a node exactly at s (a stop requested at solve time); throws if s is not a node.
  cplx phi_at(double s_value) const;
  std::size_t node_index(double s_value) const;
};

/// Solve from w in C \ (0, inf). Extra stops are forced mesh nodes in (0, span).
PhiPath solve_phi(const ReversedIncrement& b, cplx w, const SolverConfig& cfg = {},
                  std::span<const double> stops = {});

/// The w = 0 solution as the y -> 0 limit of solve_phi(-y^2) along the configured ladder.
/// All rungs share one mesh, adapted to the smallest rung. Throws NonConvergence when the
/// ladder runs out before the Cauchy test passes.
PhiPath solve_phi_zero(const ReversedIncrement& b, const SolverConfig& cfg = {},
                       std::span<const double> stops = {});

/// Residual of the identity X_s Y_s - X_0 Y_0 = int_0^s Y dbeta along a path.
struct XYReport {
  double max_residual = 0.0;
  double max_normalized = 0.0;  // residual / (1 + Y_s |beta|_TV,s)
  double worst_s = 0.0;
  double max_re_excess = 0.0;  // max(|X_s| - |beta|_TV,s, 0), for w = 0 starts
};
XYReport xy_identity_check(const PhiPath& p, const ReversedIncrement& b);

/// Cumulative int_0^{s_k} dbeta / sqrt(phi) at every node (Simpson in sqrt(s), which keeps the
/// integrand bounded at a w = 0 start).
std::vector<cplx> inverse_sqrt_integral(const PhiPath& p);

/// max_k |phi_k - w - 2 sum a dbeta + 4 s_k| / (1 + |phi_k|) with the trapezoidal-in-a sum
/// refined by the midpoints (Simpson); an integral-equation residual for self-tests.
double integral_equation_residual(const PhiPath& p);

/// CSV dump: s, re_phi, im_phi, re_sqrt, im_sqrt, local_err.
std::string phi_path_csv(const PhiPath& p);

}  // namespace loewner
