#include "loewner/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "loewner/conditions.hpp"
#include "loewner/errors.hpp"

namespace loewner {

std::string to_string(TraceMethod m) {
  return m == TraceMethod::per_anchor ? "per-anchor" : "incremental";
}

std::vector<double> uniform_grid(double horizon, int n) {
  if (n < 2) throw DomainError("grid needs at least 2 points");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = horizon * k / (n - 1);
  t.back() = horizon;
  return t;
}

namespace {

void validate_grid(const Driver& d, std::span<const double> grid) {
  if (grid.size() < 2 || grid.front() != 0.0) throw DomainError("trace grid must start at t=0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw DomainError("trace grid must be strictly increasing");
  if (grid.back() > d.horizon() * (1 + 1e-12)) throw DomainError("trace grid exceeds the horizon");
}

void precheck_c1(const Driver& d, std::span<const double> grid, const TraceConfig& cfg) {
  if (cfg.force) return;
  const auto r = check_c1(d, grid.subspan(1), {}, cfg.exec);
  for (const auto& p : r.probes)
    if (p.verdict == Verdict::fail)
      throw ConditionFailure("(C1) fails: left increment ratio " + std::to_string(p.estimate) +
                                 " >= 2",
                             p.t);
}

// Error of gamma from the error of phi: |d gamma| = |d phi| / (2 |gamma|).
double gamma_error(const PhiPath& p) {
  double e = 0.0;
  for (double x : p.local_err) e += x;
  if (!p.ladder.diffs.empty()) e += p.ladder.diffs.back() / 3.0;
  return e / (2.0 * std::max(std::abs(p.end_sqrt()), 1e-300));
}

TracePath empty_path(std::span<const double> grid, TraceMethod m) {
  TracePath out;
  out.method = m;
  out.t.assign(grid.begin(), grid.end());
  out.gamma.assign(grid.size(), cplx{});
  out.theta.assign(grid.size(), cplx{});
  out.err.assign(grid.size(), 0.0);
  return out;
}

}  // namespace

TracePath trace_per_anchor(const Driver& d, std::span<const double> grid, const TraceConfig& cfg) {
  validate_grid(d, grid);
  precheck_c1(d, grid, cfg);
  TracePath out = empty_path(grid, TraceMethod::per_anchor);
  for_each_index(cfg.exec, grid.size() - 1, [&](std::size_t i) {
    const std::size_t k = i + 1;
    const PhiPath p = solve_phi_zero(reversed_increment(d, grid[k]), cfg.solver);
    out.theta[k] = p.end_phi();
    out.gamma[k] = upper_sqrt(p.end_phi());
    out.err[k] = gamma_error(p);
  });
  return out;
}

TracePath trace_incremental(const Driver& d, std::span<const double> grid, const TraceConfig& cfg) {
  validate_grid(d, grid);
  precheck_c1(d, grid, cfg);
  const std::size_t N = grid.size() - 1;
  const std::size_t K = static_cast<std::size_t>(std::max(1, cfg.reanchor_every));
  TracePath out = empty_path(grid, TraceMethod::incremental);

  // Monitored anchors: per-anchor paths with a node at every grid offset t_n - t_m.
  std::vector<std::size_t> monitored;
  for (std::size_t n = K; n <= N; n += K) monitored.push_back(n);
  std::vector<PhiPath> monitor(monitored.size());
  for_each_index(cfg.exec, monitored.size(), [&](std::size_t i) {
    const std::size_t n = monitored[i];
    std::vector<double> stops;
    for (std::size_t m = 1; m < n; ++m) stops.push_back(grid[n] - grid[m]);
    monitor[i] = solve_phi_zero(reversed_increment(d, grid[n]), cfg.solver, stops);
  });

  std::vector<cplx> x(N + 1, cplx{});
  std::vector<double> err(N + 1, 0.0);
  for (std::size_t j = N; j >= 1; --j) {
    const double h = grid[j] - grid[j - 1];
    const ReversedIncrement seg(d, grid[j], h);
    // Advance every stored point n > j through segment j.
    for_each_index(cfg.exec, N - j, [&](std::size_t i) {
      const std::size_t n = j + 1 + i;
      const PhiPath p = solve_phi(seg, x[n], cfg.solver);
      x[n] = p.end_phi();
      for (double e : p.local_err) err[n] += e;
    });
    const PhiPath p0 = solve_phi_zero(seg, cfg.solver);
    x[j] = p0.end_phi();
    err[j] = p0.ladder.diffs.back() / 3.0;
    for (double e : p0.local_err) err[j] += e;

    for (std::size_t i = 0; i < monitored.size(); ++i) {
      const std::size_t n = monitored[i];
      if (n <= j || ((n - j + 1) % K != 0 && j != 1)) continue;
      const PhiPath& ref = monitor[i];
      const cplx target = j == 1 ? ref.end_phi() : ref.phi_at(grid[n] - grid[j - 1]);
      const double drift = std::abs(x[n] - target);
      if (drift > 10.0 * cfg.monitor_tol) throw DriftError(grid[n], drift);
      if (j != 1) x[n] = target;
    }
  }
  for (std::size_t n = 1; n <= N; ++n) {
    out.theta[n] = x[n];
    out.gamma[n] = upper_sqrt(x[n]);
    out.err[n] = err[n] / (2.0 * std::max(std::abs(out.gamma[n]), 1e-300));
  }
  return out;
}

double max_distance(const TracePath& a, const TracePath& b) {
  if (a.t.size() != b.t.size()) throw DomainError("max_distance: traces on different grids");
  double d = 0.0;
  for (std::size_t k = 0; k < a.gamma.size(); ++k) d = std::max(d, std::abs(a.gamma[k] - b.gamma[k]));
  return d;
}

namespace {

double point_segment(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double u = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + u * ab));
}

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

double segment_distance(cplx a, cplx b, cplx c, cplx e) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, e - a);
  const double d3 = cross(e - c, a - c), d4 = cross(e - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return 0.0;
  return std::min({point_segment(a, c, e), point_segment(b, c, e), point_segment(c, a, b),
                   point_segment(e, a, b)});
}

}  // namespace

SimplenessReport simpleness_check(const TracePath& p, double min_gap_factor, Exec exec) {
  SimplenessReport r;
  const std::size_t nseg = p.gamma.size() < 2 ? 0 : p.gamma.size() - 1;
  std::vector<double> len(nseg);
  for (std::size_t k = 0; k < nseg; ++k) len[k] = std::abs(p.gamma[k + 1] - p.gamma[k]);
  struct Best {
    double ratio = std::numeric_limits<double>::infinity();
    double dist = 0.0;
    std::size_t j = 0;
    std::size_t pairs = 0;
  };
  std::vector<Best> best(nseg);
  for_each_index(exec, nseg, [&](std::size_t i) {
    Best b;
    for (std::size_t j = i + 2; j < nseg; ++j) {
      const double res = std::min(len[i], len[j]);
      const double dist = segment_distance(p.gamma[i], p.gamma[i + 1], p.gamma[j], p.gamma[j + 1]);
      const double ratio = res > 0.0 ? dist / res : std::numeric_limits<double>::infinity();
      ++b.pairs;
      if (ratio < b.ratio) b = {ratio, dist, j, b.pairs};
    }
    best[i] = b;
  });
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nseg; ++i) {
    r.pairs += best[i].pairs;
    if (best[i].ratio < r.min_ratio) {
      r.min_ratio = best[i].ratio;
      r.min_distance = best[i].dist;
      r.seg_i = i;
      r.seg_j = best[i].j;
    }
  }
  r.pass = !(r.min_ratio < min_gap_factor);
  return r;
}

std::string trace_csv(const TracePath& p, bool sqrt_time_column) {
  std::string out = sqrt_time_column ? "t,re_gamma,im_gamma,err_estimate,sqrt_t\n"
                                     : "t,re_gamma,im_gamma,err_estimate\n";
  char buf[256];
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.6g", p.t[k],
                                p.gamma[k].real(), p.gamma[k].imag(), p.err[k]);
    out.append(buf, static_cast<std::size_t>(n));
    if (sqrt_time_column) {
      std::snprintf(buf, sizeof buf, ",%.17g", std::sqrt(p.t[k]));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace loewner
