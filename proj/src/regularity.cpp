#include "loewner/regularity.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "loewner/errors.hpp"

namespace loewner {
namespace {

cplx theta_at(const Driver& d, double t, const SolverConfig& cfg) {
  if (t == 0.0) return 0.0;
  return solve_phi_zero(reversed_increment(d, t), cfg).end_phi();
}

}  // namespace

cplx theta_derivative(const Driver& d, double t0, const RegularityConfig& cfg) {
  if (t0 < 0.0 || t0 > d.horizon() * (1.0 + 1e-12)) throw DomainError("theta_derivative needs t0 in [0, T]");
  if (t0 == 0.0) return -4.0;
  if (!cfg.force && probe_divergence(d, t0, cfg.divergence_decades, cfg.divergence_cells).divergent)
    throw DivergentIntegral(t0);
  const PhiPath p = solve_phi_zero(reversed_increment(d, t0), cfg.solver);
  const cplx integral = inverse_sqrt_integral(p).back();
  if (!std::isfinite(integral.real()) || !std::isfinite(integral.imag())) throw DivergentIntegral(t0);
  return -4.0 * std::exp(integral);
}

cplx z_factor(const Driver& d, double t0, double s, const RegularityConfig& cfg) {
  if (!(t0 > 0.0) || s < 0.0 || s > t0) throw DomainError("z_factor needs 0 <= s <= t0, t0 > 0");
  if (s == 0.0) return 1.0;
  if (!cfg.force && probe_divergence(d, t0, cfg.divergence_decades, cfg.divergence_cells).divergent)
    throw DivergentIntegral(t0);
  const double stop[] = {s};
  const PhiPath p = solve_phi_zero(reversed_increment(d, t0), cfg.solver,
                                   s < t0 ? std::span<const double>(stop) : std::span<const double>());
  return std::exp(inverse_sqrt_integral(p)[p.node_index(s)]);
}

cplx z_ratio(const Driver& d, double t0, double s, double h, const SolverConfig& cfg) {
  if (!(h > 0.0) || t0 + h > d.horizon() * (1.0 + 1e-12)) throw DomainError("z_ratio needs 0 < h, t0 + h <= T");
  const double stops_long[] = {h, s + h};
  const PhiPath longer = solve_phi_zero(reversed_increment(d, t0 + h), cfg, stops_long);
  const double stop_s[] = {s};
  const PhiPath base = solve_phi_zero(reversed_increment(d, t0), cfg,
                                      s < t0 ? std::span<const double>(stop_s) : std::span<const double>());
  return (longer.phi_at(s + h) - base.phi_at(s)) / longer.phi_at(h);
}

cplx fd_theta_derivative(const Driver& d, double t0, double h, const SolverConfig& cfg) {
  if (!(h > 0.0)) throw DomainError("fd_theta_derivative needs h > 0");
  const double dir = t0 + h <= d.horizon() ? 1.0 : -1.0;
  if (t0 - h < 0.0 && dir < 0.0) throw DomainError("no room for a one-sided difference");
  const cplx th0 = theta_at(d, t0, cfg);
  cplx D[3];
  for (int k = 0; k < 3; ++k) {
    const double hk = h / double(1 << k);
    D[k] = (theta_at(d, t0 + dir * hk, cfg) - th0) / (dir * hk);
  }
  // First-order one-sided error, two Richardson passes.
  const cplx r1 = 2.0 * D[1] - D[0];
  const cplx r2 = 2.0 * D[2] - D[1];
  return (4.0 * r2 - r1) / 3.0;
}

double flow_property_defect(const Driver& d, double t, double s, double h, const SolverConfig& cfg) {
  if (!(h > 0.0) || !(s > 0.0) || s > t || t + h > d.horizon() * (1.0 + 1e-12))
    throw DomainError("flow_property_defect needs 0 < s <= t, h > 0, t + h <= T");
  const double stops[] = {h, s + h};
  const PhiPath longer = solve_phi_zero(reversed_increment(d, t + h), cfg,
                                        s + h < t + h ? std::span<const double>(stops)
                                                      : std::span<const double>(stops, 1));
  const cplx w = longer.phi_at(h);
  const PhiPath composed = solve_phi(ReversedIncrement(d, t, s), w, cfg);
  return std::abs(longer.phi_at(s + h) - composed.end_phi());
}

std::vector<double> sqrt_grid(double horizon, int n) {
  if (n < 2) throw DomainError("sqrt_grid needs n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double u = double(j) / (n - 1);
    g[static_cast<std::size_t>(j)] = horizon * u * u;
  }
  g.back() = horizon;
  return g;
}

TangentReport tangent_of_sqrt_parametrization(const TracePath& p) {
  TangentReport r;
  for (std::size_t k = 0; k + 1 < p.gamma.size(); ++k) {
    const cplx chord = p.gamma[k + 1] - p.gamma[k];
    if (std::abs(chord) == 0.0) continue;
    double a = std::arg(chord);
    if (!r.angle.empty()) {
      // Unwrap against the previous chord.
      const double prev = r.angle.back();
      a += 2 * std::numbers::pi * std::round((prev - a) / (2 * std::numbers::pi));
      const double jump = std::abs(a - prev);
      r.max_jump = std::max(r.max_jump, jump);
      r.total_turning += jump;
    }
    r.angle.push_back(a);
    r.s.push_back(0.5 * (std::sqrt(p.t[k]) + std::sqrt(p.t[k + 1])));
  }
  return r;
}

double turning_between(const TangentReport& r, double t_lo, double t_hi) {
  double total = 0.0;
  for (std::size_t k = 1; k < r.angle.size(); ++k) {
    const double t = r.s[k] * r.s[k];
    if (t >= t_lo && t <= t_hi) total += std::abs(r.angle[k] - r.angle[k - 1]);
  }
  return total;
}

DerivativeReport derivative_report(const Driver& d, std::span<const double> t0s, double fd_h,
                                   const RegularityConfig& cfg, Exec exec) {
  DerivativeReport r;
  const C2Report c2 = check_c2(d, {}, exec);
  r.c2 = c2.verdict;
  r.c2_reason = c2.reason;
  r.rows.resize(t0s.size());
  for_each_index(exec, t0s.size(), [&](std::size_t i) {
    DerivativeRow& row = r.rows[i];
    row.t0 = t0s[i];
    try {
      row.analytic = theta_derivative(d, row.t0, cfg);
    } catch (const DivergentIntegral&) {
      row.divergent = true;
    }
    row.fd = row.t0 == 0.0 ? cplx(-4.0) : fd_theta_derivative(d, row.t0, fd_h, cfg.solver);
    row.rel_err = row.divergent ? std::numeric_limits<double>::infinity()
                                : std::abs(row.analytic - row.fd) / std::abs(row.analytic);
  });
  return r;
}

std::string derivative_csv(const DerivativeReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t0,re_analytic,im_analytic,re_fd,im_fd,rel_err,c2_flag\n";
  for (const auto& row : r.rows) {
    os << row.t0 << ',';
    if (row.divergent)
      os << "nan,nan,";
    else
      os << row.analytic.real() << ',' << row.analytic.imag() << ',';
    os << row.fd.real() << ',' << row.fd.imag() << ',' << row.rel_err << ',' << to_string(r.c2)
       << '\n';
  }
  return os.str();
}

}  // namespace loewner
