#include "loewner/forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "loewner/errors.hpp"

namespace loewner {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

double u_at(const Driver& d, double t) { return d.value(std::min(t, d.horizon())); }

// dg/dsigma = 4 sigma / (g - U(sigma^2)).
struct Field {
  const Driver* d;
  void operator()(const State& x, State& dx, double sg) const {
    const cplx w = cplx(x[0], x[1]) - u_at(*d, sg * sg);
    const cplx f = 4.0 * sg / w;
    dx[0] = f.real();
    dx[1] = f.imag();
  }
};

// Largest sigma step whose time step stays under dt.
double sigma_step_for(double sg, double dt) { return dt / (sg + std::sqrt(sg * sg + dt)); }

}  // namespace

ForwardFlow flow_forward(const Driver& d, cplx z, const ForwardConfig& cfg, double t_end) {
  if (z == cplx(0.0) || z.imag() < 0.0) throw DomainError("forward flow needs z != 0 in the closed upper half-plane");
  const double T = d.horizon();
  if (t_end < 0.0) t_end = T;
  if (t_end > T * (1.0 + 1e-12)) throw DomainError("forward flow beyond the horizon");
  t_end = std::min(t_end, T);

  std::vector<double> stops;
  for (double b : d.breakpoints())
    if (b < t_end) stops.push_back(std::sqrt(b));
  stops.push_back(std::sqrt(t_end));

  ForwardFlow f;
  f.z = z;
  f.t.push_back(0.0);
  f.g.push_back(z);
  if (t_end == 0.0) return f;

  auto stepper = odeint::make_controlled(cfg.atol, cfg.rtol, odeint::runge_kutta_dopri5<State>());
  const Field field{&d};
  State x{z.real(), z.imag()};
  double sg = 0.0;
  double dsg = std::sqrt(cfg.base_step * T) / 8;
  double prev_dist = std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  long steps = 0;

  while (next < stops.size()) {
    const cplx g(x[0], x[1]);
    const double dist = std::abs(g - u_at(d, sg * sg));
    // Proximity alone misfires on tangential near misses, so the field must also be growing.
    if (dist < cfg.swallow_tol && dist <= prev_dist) {
      f.status = FlowStatus::swallowed;
      f.swallow_time = sg * sg;
      return f;
    }
    prev_dist = dist;
    if (++steps > cfg.max_steps) throw SolverFailure("forward flow exceeded max_steps", sg * sg);

    const double dt_cap = std::min(cfg.base_step * T, cfg.step_factor * dist * dist);
    double trial = std::min(dsg, sigma_step_for(sg, dt_cap));
    const double stop = stops[next];
    const bool lands = trial >= stop - sg;
    if (lands) trial = stop - sg;

    const State before = x;
    double s_try = sg;
    const auto res = stepper.try_step(field, x, s_try, trial);
    if (res != odeint::success) {
      x = before;
      dsg = trial;
      if (dsg < cfg.min_step) {
        if (dist < std::sqrt(cfg.swallow_tol)) {
          f.status = FlowStatus::swallowed;
          f.swallow_time = sg * sg;
          return f;
        }
        throw SolverFailure("forward step underflow", sg * sg);
      }
      continue;
    }
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) throw SolverFailure("forward flow left the finite range", sg * sg);
    sg = lands ? stop : s_try;
    if (lands) ++next;
    dsg = std::max(trial, cfg.min_step);
    f.t.push_back(lands && next == stops.size() ? t_end : sg * sg);
    f.g.push_back(cplx(x[0], x[1]));
  }
  const double dist = std::abs(f.g.back() - u_at(d, t_end));
  if (dist < cfg.swallow_tol) {
    f.status = FlowStatus::swallowed;
    f.swallow_time = t_end;
  }
  return f;
}

HcapReport hcap_estimate(const Driver& d, double t, const ForwardConfig& cfg, double radius,
                         int probes, double fit_tol) {
  if (!(t > 0.0) || t > d.horizon() * (1.0 + 1e-12)) throw DomainError("hcap_estimate needs t in (0, T]");
  if (probes < 8) throw DomainError("hcap_estimate needs at least 8 probes");
  constexpr int kTerms = 6;
  std::vector<cplx> z(static_cast<std::size_t>(probes)), y(z.size());
  for (int k = 0; k < probes; ++k)
    z[static_cast<std::size_t>(k)] = std::polar(radius, std::numbers::pi * (k + 0.5) / probes);
  for_each_index(Exec::parallel, z.size(), [&](std::size_t k) {
    const ForwardFlow f = flow_forward(d, z[k], cfg, t);
    y[k] = f.end() - z[k];
  });

  Eigen::MatrixXcd A(probes, kTerms);
  Eigen::VectorXcd rhs(probes);
  for (int k = 0; k < probes; ++k) {
    const cplx inv = 1.0 / z[static_cast<std::size_t>(k)];
    cplx p = inv;
    for (int j = 0; j < kTerms; ++j, p *= inv) A(k, j) = p;
    rhs(k) = y[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(rhs);

  HcapReport r;
  r.t = t;
  r.radius = radius;
  r.b = c(0).real();
  r.half = r.b / 2;
  r.fit_residual = (A * c - rhs).cwiseAbs().maxCoeff();
  r.warning = r.fit_residual > fit_tol;
  return r;
}

namespace {

// Value at x = 0 of the polynomial through (x_k, y_k).
cplx neville_at_zero(const std::vector<double>& x, std::vector<cplx> y) {
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      y[i] = (x[i + m] * y[i] - x[i] * y[i + 1]) / (x[i + m] - x[i]);
  return y[0];
}

}  // namespace

RoundtripReport roundtrip_residual(const Driver& d, const TracePath& p, const ForwardConfig& cfg,
                                   const RoundtripOptions& opts, Exec exec) {
  RoundtripReport rep;
  const std::size_t n = p.t.size();
  if (n < 2 || opts.samples < 1 || opts.eta_levels < 2) return rep;

  std::vector<std::size_t> idx;
  for (int j = 1; j <= opts.samples; ++j) {
    const auto k = static_cast<std::size_t>(std::llround(double(j) * double(n - 1) / opts.samples));
    if (k >= 1 && (idx.empty() || idx.back() != k)) idx.push_back(k);
  }
  rep.points.resize(idx.size());
  const auto levels = static_cast<std::size_t>(opts.eta_levels);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto& pt = rep.points[i];
    pt.index = idx[i];
    pt.t = p.t[idx[i]];
    pt.eta.resize(levels);
    pt.raw.resize(levels);
    const double scale = std::max(std::abs(p.gamma[idx[i]]), 1e-300);
    for (std::size_t l = 0; l < levels; ++l)
      pt.eta[l] = opts.eta0 * scale * std::pow(opts.eta_ratio, double(l));
  }

  for_each_index(exec, idx.size() * levels, [&](std::size_t job) {
    auto& pt = rep.points[job / levels];
    const std::size_t l = job % levels;
    const std::size_t k = pt.index;
    // Continue past the tip along the last chord, off the hull.
    cplx tangent = p.gamma[k] - p.gamma[k - 1];
    tangent = std::abs(tangent) > 0.0 ? tangent / std::abs(tangent) : cplx(0.0, 1.0);
    const ForwardFlow f = flow_forward(d, p.gamma[k] + pt.eta[l] * tangent, cfg, pt.t);
    pt.raw[l] = f.status == FlowStatus::swallowed
                    ? cplx(std::numeric_limits<double>::infinity())
                    : f.end() - d.value(pt.t);
  });

  for (auto& pt : rep.points) {
    std::vector<double> x(pt.eta.size());
    for (std::size_t l = 0; l < x.size(); ++l) x[l] = std::sqrt(pt.eta[l]);
    pt.extrapolated = neville_at_zero(x, pt.raw);
    pt.residual = std::abs(pt.extrapolated);
    if (!std::isfinite(pt.residual)) pt.residual = std::numeric_limits<double>::infinity();
    rep.max_residual = std::max(rep.max_residual, pt.residual);
  }
  return rep;
}

nlohmann::json to_json(const HcapReport& r) {
  return {{"t", r.t},         {"b", r.b},
          {"half", r.half},   {"fit_residual", r.fit_residual},
          {"radius", r.radius}, {"warning", r.warning}};
}

nlohmann::json to_json(const RoundtripReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"t", p.t},
                   {"index", p.index},
                   {"residual", p.residual},
                   {"re_extrapolated", p.extrapolated.real()},
                   {"im_extrapolated", p.extrapolated.imag()}});
  return {{"max_residual", r.max_residual}, {"points", pts}};
}

}  // namespace loewner
