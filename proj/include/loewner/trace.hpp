#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "loewner/driver.hpp"
#include "loewner/parallel.hpp"
#include "loewner/reverse_solver.hpp"

namespace loewner {

enum class TraceMethod { per_anchor, incremental };
std::string to_string(TraceMethod m);

struct TraceConfig {
  SolverConfig solver;
  Exec exec = Exec::parallel;
  /// Skip the (C1) precheck on the grid.
  bool force = false;
  /// Incremental method: every K-th grid point is also solved per anchor; its sweep value is
  /// compared and reset to the per-anchor one every K segments.
  int reanchor_every = 64;
  /// Drift above 10x this aborts the incremental sweep.
  double monitor_tol = 1e-6;
};

/// gamma_k = sqrt(phi_{t_k}^{t_k}(0)) on the grid, gamma_0 = 0.
struct TracePath {
  TraceMethod method = TraceMethod::per_anchor;
  std::vector<double> t;
  std::vector<cplx> gamma;
  std::vector<cplx> theta;  // phi_t^t(0) = gamma^2
  std::vector<double> err;  // estimated error of gamma
};

/// n points t_k = k T / (n - 1), k = 0..n-1.
std::vector<double> uniform_grid(double horizon, int n);

/// Independent solve_phi_zero at every grid point. Needs grid[0] = 0.
TracePath trace_per_anchor(const Driver& d, std::span<const double> grid,
                           const TraceConfig& cfg = {});

/// Reverse segment sweep built on the flow property. With M_j the flow of beta^{t_j} over
/// [0, t_j - t_{j-1}], gamma_n^2 = M_1(M_2(...M_{n-1}(M_n(0)))). Sweeping j = N..1, every
/// stored point takes one flow step through segment j and M_j(0) joins the store: O(N^2)
/// short flow solves, parallel across stored points.
TracePath trace_incremental(const Driver& d, std::span<const double> grid,
                            const TraceConfig& cfg = {});

double max_distance(const TracePath& a, const TracePath& b);

struct SimplenessReport {
  bool pass = true;
  double min_ratio = 0.0;     // distance / local resolution over all non-adjacent pairs
  double min_distance = 0.0;  // at the worst pair
  std::size_t seg_i = 0, seg_j = 0;
  std::size_t pairs = 0;
};

/// Distance between non-adjacent polyline segments [k, k+1], relative to the local
/// resolution min(|segment| lengths of both and their neighbours).
SimplenessReport simpleness_check(const TracePath& p, double min_gap_factor = 0.5,
                                  Exec exec = Exec::parallel);

/// CSV: t, re_gamma, im_gamma, err_estimate (and sqrt_t when asked).
std::string trace_csv(const TracePath& p, bool sqrt_time_column = false);

}  // namespace loewner
