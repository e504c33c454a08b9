#include "loewner/reverse_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

struct State {
  cplx phi;
  cplx a;
};

// beta along a step, frozen to the quadratic through tau = 0, 1/2, 1: q'(tau) = A + 2 B tau.
struct Quad {
  double A, B;
  double d(double tau) const { return A + 2.0 * B * tau; }
};

Quad quad(double b0, double bm, double b1) {
  return {4.0 * (bm - b0) - (b1 - b0), 2.0 * (b1 - b0) - 4.0 * (bm - b0)};
}

enum class Form { phi, h };

// One RK4 step in sigma = sqrt(s) over [sg0, sg0 + dsg], tau in [0, 1]. In sigma the w = 0
// solution -4 s + O(s^{3/2}) is a smooth polynomial-like function, and ds = 2 sigma dsigma:
//   phi-form  dphi/dtau = 2 sqrt(phi) q'(tau) - 8 sigma dsigma
//   h-form    dh/dtau   = q'(tau) - 4 sigma dsigma / h
State rk4(const State& x, double sg0, double dsg, const Quad& q, Form form, double guard) {
  auto sigma = [&](double tau) { return sg0 + tau * dsg; };
  if (form == Form::phi) {
    auto f = [&](double tau, cplx a) { return 2.0 * a * q.d(tau) - 8.0 * sigma(tau) * dsg; };
    const cplx k1 = f(0.0, x.a);
    const cplx p2 = x.phi + 0.5 * k1;
    const cplx k2 = f(0.5, branch_sqrt_step(x.a, p2, guard));
    const cplx p3 = x.phi + 0.5 * k2;
    const cplx k3 = f(0.5, branch_sqrt_step(x.a, p3, guard));
    const cplx p4 = x.phi + k3;
    const cplx k4 = f(1.0, branch_sqrt_step(x.a, p4, guard));
    const cplx phi1 = x.phi + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    return {phi1, branch_sqrt_step(x.a, phi1, guard)};
  }
  auto f = [&](double tau, cplx h) { return q.d(tau) - 4.0 * sigma(tau) * dsg / h; };
  const cplx k1 = f(0.0, x.a);
  const cplx k2 = f(0.5, x.a + 0.5 * k1);
  const cplx k3 = f(0.5, x.a + 0.5 * k2);
  const cplx k4 = f(1.0, x.a + k3);
  const cplx h1 = x.a + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  const cplx phi1 = h1 * h1;
  return {phi1, h1.imag() >= 0.0 ? h1 : branch_sqrt_step(x.a, phi1, guard)};
}

using Beta5 = std::array<double, 5>;  // beta at tau = 0, 1/4, 1/2, 3/4, 1 of a sigma-step

struct DoubleStep {
  State mid, end;
  double err;
  bool jump;
};

DoubleStep double_step(const State& x, double sg0, double dsg, const Beta5& b, double span,
                       const SolverConfig& cfg) {
  const bool moving = b[1] != b[0] || b[2] != b[0] || b[3] != b[0] || b[4] != b[0];
  const Form form = cfg.hybrid && moving && x.a.imag() >= cfg.hybrid_threshold * std::sqrt(span)
                        ? Form::h
                        : Form::phi;
  const double half = 0.5 * dsg;
  const State full = rk4(x, sg0, dsg, quad(b[0], b[2], b[4]), form, cfg.branch_guard);
  const State mid = rk4(x, sg0, half, quad(b[0], b[1], b[2]), form, cfg.branch_guard);
  const State end = rk4(mid, sg0 + half, half, quad(b[2], b[3], b[4]), form, cfg.branch_guard);
  const double err = std::abs(end.phi - full.phi) / 15.0;
  // Branch flips show up as jumps of a far beyond what dh = dbeta - 2/h ds allows.
  const double ds = dsg * (2.0 * sg0 + dsg);
  const double bound = 2.0 * (std::abs(b[2] - b[0]) + std::abs(b[4] - b[2])) +
                       8.0 * std::sqrt(ds) + 0.5 * std::abs(x.a);
  const bool jump = std::abs(end.a - x.a) > bound || std::abs(full.a - end.a) > bound;
  return {mid, end, err, jump};
}

// The mesh of one solve, reusable for other starting points.
struct Mesh {
  std::vector<double> sg;    // sigma nodes, sg[0] = 0
  std::vector<double> s;     // the same nodes in s, exact at stops
  std::vector<Beta5> beta;   // per step
};

struct Trajectory {
  std::vector<State> node;
  std::vector<State> mid;
  std::vector<double> err;
};

std::vector<double> collect_stops(const ReversedIncrement& b, const SolverConfig& cfg,
                                  std::span<const double> extra, bool singular) {
  const double span = b.span();
  std::vector<double> stops = b.breakpoints();
  for (double x : extra)
    if (x > 0.0 && x < span) stops.push_back(x);
  const double seed_span = span / 16.0;
  for (int k = 1; singular && k <= cfg.graded_points; ++k)
    stops.push_back(seed_span * std::pow(static_cast<double>(k) / cfg.graded_points, cfg.grading));
  stops.push_back(span);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [&](double x, double y) { return y - x <= 1e-14 * span; }),
              stops.end());
  stops.back() = span;
  return stops;
}

// The step end s1 is passed exactly: squaring sqrt(stop) is off by an ulp, and drivers with an
// infinite derivative at the far end of the span turn that ulp into a visible beta error.
Beta5 sample_beta(const ReversedIncrement& b, double sg0, double dsg, double b0, double s1) {
  Beta5 out{b0, 0, 0, 0, b.value(s1)};
  for (int j = 1; j <= 3; ++j) {
    const double sg = sg0 + 0.25 * j * dsg;
    out[static_cast<std::size_t>(j)] = b.value(sg * sg);
  }
  return out;
}

State start_state(cplx w) { return {w, upper_sqrt(w)}; }

void check_start(cplx w) {
  if (w.imag() == 0.0 && w.real() > 0.0)
    throw DomainError("solve_phi: start point on the open positive real axis");
}

std::pair<Mesh, Trajectory> integrate_adaptive(const ReversedIncrement& b, cplx w,
                                               const SolverConfig& cfg,
                                               std::span<const double> extra) {
  const double span = b.span();
  const double root = std::sqrt(span);
  const bool singular = std::abs(w) < 1e-2 * span;
  const auto stops = collect_stops(b, cfg, extra, singular);
  std::vector<double> sg_stops(stops.size());
  for (std::size_t k = 0; k < stops.size(); ++k) sg_stops[k] = std::sqrt(stops[k]);
  const double hmax = cfg.base_step * root;
  const double hmin = cfg.min_step * root;
  const double atol = cfg.atol * span;

  Mesh mesh;
  Trajectory tr;
  mesh.sg.push_back(0.0);
  mesh.s.push_back(0.0);
  State x = start_state(w);
  tr.node.push_back(x);
  tr.err.push_back(0.0);

  double sg = 0.0;
  double b0 = 0.0;
  double dsg = hmax;
  std::size_t next = 0;
  long steps = 0;
  while (next < stops.size()) {
    const double stop = sg_stops[next];
    dsg = std::min(dsg, hmax);
    bool lands = false;
    if (sg + 1.01 * dsg >= stop) {
      dsg = stop - sg;
      lands = true;
    }
    if (++steps > cfg.max_steps) throw SolverFailure("step budget exhausted", sg * sg);
    const double s1 = lands ? stops[next] : (sg + dsg) * (sg + dsg);
    const Beta5 bb = sample_beta(b, sg, dsg, b0, s1);
    const DoubleStep st = double_step(x, sg, dsg, bb, span, cfg);
    const double tol = atol + cfg.rtol * std::abs(st.end.phi);
    const bool finite = std::isfinite(st.end.phi.real()) && std::isfinite(st.end.phi.imag());
    if (!finite || st.err > tol || st.jump) {
      if (dsg <= hmin) throw SolverFailure("step size underflow", sg * sg);
      const double shrink =
          finite && !st.jump ? std::clamp(0.9 * std::pow(tol / st.err, 0.2), 0.2, 0.9) : 0.25;
      dsg = std::max(hmin, dsg * shrink);
      continue;
    }
    sg = lands ? stop : sg + dsg;
    mesh.sg.push_back(sg);
    mesh.s.push_back(s1);
    mesh.beta.push_back(bb);
    tr.mid.push_back(st.mid);
    tr.node.push_back(st.end);
    tr.err.push_back(st.err);
    x = st.end;
    b0 = bb[4];
    if (lands) ++next;
    const double grow =
        st.err > 0.0 ? std::clamp(0.9 * std::pow(tol / st.err, 0.2), 0.2, 4.0) : 4.0;
    dsg *= grow;
  }
  return {std::move(mesh), std::move(tr)};
}

// Fixed mode: s_k = (k d)^2 span while those increments stay below the uniform step d span,
// then uniform; breakpoints and requested stops are inserted.
Mesh fixed_mesh(const ReversedIncrement& b, const SolverConfig& cfg, std::span<const double> extra) {
  const double span = b.span();
  const double d = cfg.base_step;
  std::vector<double> s{0.0};
  for (int k = 1;; ++k) {
    const double x = span * (k * d) * (k * d);
    if (x - s.back() >= d * span || x >= span) break;
    s.push_back(x);
  }
  for (double x = s.back() + d * span; x < span * (1 - 1e-12); x += d * span) s.push_back(x);
  s.push_back(span);
  for (double x : b.breakpoints()) s.push_back(x);
  for (double x : extra)
    if (x > 0.0 && x < span) s.push_back(x);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(), [&](double x, double y) { return y - x <= 1e-14 * span; }),
          s.end());
  s.back() = span;
  Mesh m;
  m.s = s;
  for (double x : s) m.sg.push_back(std::sqrt(x));
  double b0 = 0.0;
  for (std::size_t k = 0; k + 1 < m.sg.size(); ++k) {
    m.beta.push_back(sample_beta(b, m.sg[k], m.sg[k + 1] - m.sg[k], b0, s[k + 1]));
    b0 = m.beta.back()[4];
  }
  return m;
}

Trajectory replay(const Mesh& mesh, cplx w, double span, const SolverConfig& cfg) {
  Trajectory tr;
  State x = start_state(w);
  tr.node.reserve(mesh.sg.size());
  tr.node.push_back(x);
  tr.err.push_back(0.0);
  for (std::size_t k = 0; k + 1 < mesh.sg.size(); ++k) {
    const DoubleStep st =
        double_step(x, mesh.sg[k], mesh.sg[k + 1] - mesh.sg[k], mesh.beta[k], span, cfg);
    if (!std::isfinite(st.end.phi.real()) || !std::isfinite(st.end.phi.imag()))
      throw SolverFailure("non-finite state", mesh.sg[k] * mesh.sg[k]);
    tr.mid.push_back(st.mid);
    tr.node.push_back(st.end);
    tr.err.push_back(st.err);
    x = st.end;
  }
  return tr;
}

PhiPath assemble(const ReversedIncrement& b, cplx w, const Mesh& mesh, const Trajectory& tr) {
  PhiPath p;
  p.anchor = b.anchor();
  p.span = b.span();
  p.start = w;
  const std::size_t n = mesh.sg.size();
  p.s = mesh.s;
  p.phi.resize(n);
  p.a.resize(n);
  p.beta.resize(n);
  p.local_err = tr.err;
  for (std::size_t k = 0; k < n; ++k) {
    p.phi[k] = tr.node[k].phi;
    p.a[k] = tr.node[k].a;
    p.beta[k] = k == 0 ? 0.0 : mesh.beta[k - 1][4];
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    p.mid_phi.push_back(tr.mid[k].phi);
    p.mid_a.push_back(tr.mid[k].a);
    p.mid_beta.push_back(mesh.beta[k][2]);
    const double m = 0.5 * (mesh.sg[k] + mesh.sg[k + 1]);
    p.mid_s.push_back(m * m);
  }
  return p;
}

double sup_diff(const Trajectory& x, const Trajectory& y) {
  double d = 0.0;
  for (std::size_t k = 0; k < x.node.size(); ++k) d = std::max(d, std::abs(x.node[k].phi - y.node[k].phi));
  for (std::size_t k = 0; k < x.mid.size(); ++k) d = std::max(d, std::abs(x.mid[k].phi - y.mid[k].phi));
  return d;
}

}  // namespace

std::size_t PhiPath::node_index(double s_value) const {
  const auto it = std::lower_bound(s.begin(), s.end(), s_value - 1e-12 * span);
  if (it == s.end() || std::abs(*it - s_value) > 1e-12 * span)
    throw DomainError("PhiPath: s=" + std::to_string(s_value) + " is not a mesh node");
  return static_cast<std::size_t>(it - s.begin());
}

cplx PhiPath::phi_at(double s_value) const { return phi[node_index(s_value)]; }

PhiPath solve_phi(const ReversedIncrement& b, cplx w, const SolverConfig& cfg,
                  std::span<const double> stops) {
  check_start(w);
  if (cfg.adaptive) {
    auto [mesh, tr] = integrate_adaptive(b, w, cfg, stops);
    return assemble(b, w, mesh, tr);
  }
  const Mesh mesh = fixed_mesh(b, cfg, stops);
  return assemble(b, w, mesh, replay(mesh, w, b.span(), cfg));
}

PhiPath solve_phi_zero(const ReversedIncrement& b, const SolverConfig& cfg,
                       std::span<const double> stops) {
  const double span = b.span();
  const double root = std::sqrt(span);
  std::vector<double> ys;
  if (!cfg.ladder.empty()) {
    for (double y : cfg.ladder) ys.push_back(y * root);
  } else {
    double y = cfg.y0;
    for (int k = 0; k < cfg.max_rungs; ++k, y *= cfg.ladder_q) ys.push_back(y * root);
  }
  for (std::size_t k = 0; k < ys.size(); ++k)
    if (!(ys[k] > 0.0) || (k > 0 && !(ys[k] < ys[k - 1])))
      throw DomainError("solve_phi_zero: ladder must be positive and strictly decreasing");

  // One mesh for every rung, adapted to the most singular start.
  Mesh mesh;
  if (cfg.adaptive) {
    mesh = integrate_adaptive(b, cplx{-ys.back() * ys.back(), 0.0}, cfg, stops).first;
  } else {
    mesh = fixed_mesh(b, cfg, stops);
  }

  LadderInfo info;
  Trajectory prev;
  Trajectory cur;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    cur = replay(mesh, cplx{-ys[k] * ys[k], 0.0}, span, cfg);
    info.y.push_back(ys[k]);
    if (k > 0) {
      const double d = sup_diff(cur, prev);
      info.diffs.push_back(d);
      if (d <= cfg.cauchy_tol * span) {
        info.converged = true;
        break;
      }
    }
    prev = std::move(cur);
    cur = Trajectory{};
  }
  if (!info.converged)
    throw NonConvergence("regularization ladder exhausted (last Cauchy difference " +
                             (info.diffs.empty() ? std::string("n/a")
                                                 : std::to_string(info.diffs.back())) +
                             ")",
                         b.anchor());

  PhiPath p = assemble(b, cplx{}, mesh, cur);
  p.start = cplx{-info.y.back() * info.y.back(), 0.0};
  double running = 0.0;
  for (std::size_t k = 1; k < p.s.size(); ++k) {
    const double r = b.variation(p.s[k]) / std::sqrt(p.s[k]);
    if (!(std::max(running, r) < 2.0)) break;
    running = std::max(running, r);
    info.certified_prefix = p.s[k];
  }
  info.delta = running;
  p.ladder = std::move(info);
  return p;
}

XYReport xy_identity_check(const PhiPath& p, const ReversedIncrement& b) {
  XYReport r;
  const double xy0 = p.a[0].real() * p.a[0].imag();
  double integral = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k > 0) {
      const Quad q = quad(p.beta[k - 1], p.mid_beta[k - 1], p.beta[k]);
      integral += (p.a[k - 1].imag() * q.d(0.0) + 4.0 * p.mid_a[k - 1].imag() * q.d(0.5) +
                   p.a[k].imag() * q.d(1.0)) /
                  6.0;
    }
    const double X = p.a[k].real(), Y = p.a[k].imag();
    const double tv = b.variation(p.s[k]);
    const double res = std::abs(X * Y - xy0 - integral);
    if (res > r.max_residual) {
      r.max_residual = res;
      r.worst_s = p.s[k];
    }
    r.max_normalized = std::max(r.max_normalized, res / (1.0 + Y * tv));
    r.max_re_excess = std::max(r.max_re_excess, std::abs(X) - tv);
  }
  r.max_re_excess = std::max(r.max_re_excess, 0.0);
  return r;
}

std::vector<cplx> inverse_sqrt_integral(const PhiPath& p) {
  // Simpson in the step parameter: the mesh is uniform per step in sigma = sqrt(s), where
  // dbeta / sqrt(phi) = beta'(sigma) / a dsigma stays bounded at a w = 0 start (a ~ 2 i sigma,
  // beta'(sigma) ~ 2 sigma beta'(s)). There the start value is 0 / 0, so the first step uses
  // the midpoint rule instead.
  std::vector<cplx> out(p.size(), cplx{});
  const bool singular = std::norm(p.a[0]) <= 1e-6 * p.span;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const Quad q = quad(p.beta[k], p.mid_beta[k], p.beta[k + 1]);
    const cplx fm = q.d(0.5) / p.mid_a[k];
    cplx piece;
    if (singular && k == 0)
      piece = fm;
    else
      piece = (q.d(0.0) / p.a[k] + 4.0 * fm + q.d(1.0) / p.a[k + 1]) / 6.0;
    out[k + 1] = out[k] + piece;
  }
  return out;
}

double integral_equation_residual(const PhiPath& p) {
  cplx integral{};
  double worst = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    const Quad q = quad(p.beta[k - 1], p.mid_beta[k - 1], p.beta[k]);
    integral += (p.a[k - 1] * q.d(0.0) + 4.0 * p.mid_a[k - 1] * q.d(0.5) + p.a[k] * q.d(1.0)) / 6.0;
    const cplx r = p.phi[k] - p.start - 2.0 * integral + 4.0 * p.s[k];
    worst = std::max(worst, std::abs(r) / (1.0 + std::abs(p.phi[k])));
  }
  return worst;
}

std::string phi_path_csv(const PhiPath& p) {
  std::string out = "s,re_phi,im_phi,re_sqrt,im_sqrt,local_err\n";
  char buf[256];
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.6g\n", p.s[k],
                  p.phi[k].real(), p.phi[k].imag(), p.a[k].real(), p.a[k].imag(), p.local_err[k]);
    out += buf;
  }
  return out;
}

}  // namespace loewner
