#include "loewner/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loewner/errors.hpp"

namespace loewner {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(FailReason r) {
  switch (r) {
    case FailReason::none: return "none";
    case FailReason::divergent: return "divergent";
    case FailReason::non_vanishing: return "non_vanishing";
  }
  return "?";
}

namespace {

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

void sort_unique(std::vector<double>& x) {
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
}

// Cumulative product integral of r^{-1/2} d|beta|_r at the (sorted, starting at 0) nodes.
std::vector<double> cumulative_singular(const ReversedIncrement& beta,
                                        const std::vector<double>& nodes) {
  std::vector<double> out(nodes.size(), 0.0);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1];
    const double dw = beta.variation(a, b);
    out[k + 1] = out[k] + 2.0 * dw / (std::sqrt(a) + std::sqrt(b));
  }
  return out;
}

C1Probe probe_c1(const Driver& d, double t, const C1Options& o) {
  if (!(t > 0.0) || t > d.horizon() * (1 + 1e-12))
    throw DomainError("check_c1: probe time outside (0, T]");
  C1Probe p;
  p.t = t;
  p.floor = std::max(o.floor, d.resolution(t));
  double s = t;
  for (int k = 0; k < o.levels; ++k, s *= o.q) {
    if (s < p.floor) {
      p.floor_limited = true;
      break;
    }
    p.scales.push_back(s);
  }
  if (p.floor_limited && p.floor <= t && (p.scales.empty() || p.scales.back() > p.floor))
    p.scales.push_back(p.floor);
  for (double sc : p.scales) p.ratios.push_back(d.total_variation(t - sc, t) / std::sqrt(sc));
  if (p.ratios.empty()) return p;
  const auto n = static_cast<std::ptrdiff_t>(p.ratios.size());
  const auto first = std::max<std::ptrdiff_t>(0, n - o.tail);
  p.estimate = *std::max_element(p.ratios.begin() + first, p.ratios.end());
  if (p.estimate < 2.0 - o.margin)
    p.verdict = Verdict::pass;
  else if (p.estimate > 2.0 + o.margin)
    p.verdict = Verdict::fail;
  return p;
}

}  // namespace

std::vector<double> default_probe_times(const Driver& d, int n) {
  std::vector<double> t;
  for (int k = 1; k <= n; ++k) t.push_back(d.horizon() * k / n);
  return t;
}

C1Report check_c1(const Driver& d, std::span<const double> probe_times, const C1Options& opts,
                  Exec exec) {
  C1Report r;
  r.probes.resize(probe_times.size());
  for_each_index(exec, probe_times.size(),
                 [&](std::size_t i) { r.probes[i] = probe_c1(d, probe_times[i], opts); });
  for (const auto& p : r.probes) {
    r.verdict = combine(r.verdict, p.verdict);
    r.max_estimate = std::max(r.max_estimate, p.estimate);
  }
  return r;
}

double c2_integral(const Driver& d, double t, double eps, int graded_cells) {
  if (!(eps > 0.0)) throw DomainError("c2_integral: eps must be positive");
  const ReversedIncrement beta = reversed_increment(d, t);
  const double hi = std::min(eps, beta.span());
  std::vector<double> nodes;
  for (int k = 0; k <= graded_cells; ++k) {
    const double x = static_cast<double>(k) / graded_cells;
    nodes.push_back(k == graded_cells ? hi : x * x * hi);
  }
  for (double b : beta.breakpoints())
    if (b < hi) nodes.push_back(b);
  sort_unique(nodes);
  return cumulative_singular(beta, nodes).back();
}

DivergenceProbe probe_divergence(const Driver& d, double t, int decades, int cells_per_decade) {
  const ReversedIncrement beta = reversed_increment(d, t);
  const auto br = beta.breakpoints();
  DivergenceProbe p;
  p.t = t;
  const double scale = std::max(1.0, d.total_variation(0.0, t));
  for (int m = 0; m < decades; ++m) {
    const double hi = beta.span() * std::pow(10.0, -m);
    const double lo = hi / 10.0;
    std::vector<double> nodes;
    for (int k = 0; k <= cells_per_decade; ++k)
      nodes.push_back(k == cells_per_decade ? hi
                                            : lo * std::pow(10.0, static_cast<double>(k) /
                                                                      cells_per_decade));
    for (double b : br)
      if (b > lo && b < hi) nodes.push_back(b);
    sort_unique(nodes);
    double piece = 0.0;
    double noise = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const double w = 2.0 / (std::sqrt(nodes[k]) + std::sqrt(nodes[k + 1]));
      piece += w * beta.variation(nodes[k], nodes[k + 1]);
      noise += w * scale * 8.0 * std::numeric_limits<double>::epsilon();
    }
    p.decade_pieces.push_back(piece);
    p.noise.push_back(noise);
  }
  // Ratios only between decades standing clear of round-off in the variation differences.
  for (std::size_t m = 0; m + 1 < p.decade_pieces.size(); ++m) {
    const double a = p.decade_pieces[m], b = p.decade_pieces[m + 1];
    if (a <= 100.0 * p.noise[m] || b <= 100.0 * p.noise[m + 1]) break;
    p.ratios.push_back(b / a);
  }
  // Divergent tail: the last six ratios all above 0.8 and still rising. A geometric tail
  // r^gamma has constant ratio 10^-gamma; the log-type tail of a divergent integral creeps to 1.
  constexpr std::size_t kWindow = 6;
  if (p.ratios.size() >= kWindow) {
    const auto first = p.ratios.end() - kWindow;
    const bool high = std::all_of(first, p.ratios.end(), [](double r) { return r > 0.8; });
    const bool rising = p.ratios.back() > *first + 1e-3;
    p.divergent = high && rising;
  }
  return p;
}

C2Report check_c2(const Driver& d, const C2Options& opts, Exec exec) {
  const double T = d.horizon();
  C2Report r;
  r.tolerance = opts.tolerance;
  std::vector<double> eps = opts.eps_ladder;
  if (eps.empty())
    for (int k = 1; k <= 24; ++k) eps.push_back(T * std::ldexp(1.0, -k));
  for (std::size_t j = 1; j < eps.size(); ++j)
    if (!(eps[j] < eps[j - 1])) throw DomainError("check_c2: eps ladder must be decreasing");
  if (!(eps.front() <= T * (1 + 1e-12)) || !(eps.back() > 0.0))
    throw DomainError("check_c2: eps ladder must lie in (0, T]");
  r.t_grid = opts.t_grid;
  if (r.t_grid.empty()) {
    r.t_grid = default_probe_times(d, 64);
    for (int k = 1; k <= 24; ++k) r.t_grid.push_back(T * std::ldexp(1.0, -k));
    sort_unique(r.t_grid);
  }

  const std::size_t nt = r.t_grid.size();
  std::vector<std::vector<double>> value(nt);  // value[i][j]: integral at t_i up to eps_j
  std::vector<char> divergent(nt, 0);
  for_each_index(exec, nt, [&](std::size_t i) {
    const double t = r.t_grid[i];
    const ReversedIncrement beta = reversed_increment(d, t);
    std::vector<double> nodes;
    for (double e : eps) {
      const double hi = std::min(e, t);
      for (int k = 0; k <= opts.graded_cells; ++k) {
        const double x = static_cast<double>(k) / opts.graded_cells;
        nodes.push_back(k == opts.graded_cells ? hi : x * x * hi);
      }
    }
    for (double b : beta.breakpoints())
      if (b < std::min(eps.front(), t)) nodes.push_back(b);
    sort_unique(nodes);
    const auto cum = cumulative_singular(beta, nodes);
    value[i].resize(eps.size());
    for (std::size_t j = 0; j < eps.size(); ++j) {
      const double hi = std::min(eps[j], t);
      const auto it = std::lower_bound(nodes.begin(), nodes.end(), hi);
      value[i][j] = cum[static_cast<std::size_t>(it - nodes.begin())];
    }
    divergent[i] = probe_divergence(d, t, opts.decades, opts.cells_per_decade).divergent;
  });

  for (std::size_t j = 0; j < eps.size(); ++j) {
    C2Point pt{eps[j], -1.0, 0.0};
    for (std::size_t i = 0; i < nt; ++i)
      if (value[i][j] > pt.delta) {
        pt.delta = value[i][j];
        pt.argmax_t = r.t_grid[i];
      }
    r.curve.push_back(pt);
  }
  r.final_delta = r.curve.back().delta;

  for (std::size_t i = 0; i < nt; ++i)
    if (divergent[i]) {
      r.verdict = Verdict::fail;
      r.reason = FailReason::divergent;
      r.divergent_at = r.t_grid[i];
      return r;
    }
  if (r.final_delta <= opts.tolerance) {
    r.verdict = Verdict::pass;
    return r;
  }
  // Not below tolerance: a plateau (or growth) over the last four rungs is a failure to vanish,
  // anything still visibly decreasing is left open.
  const std::size_t n = r.curve.size();
  const double earlier = r.curve[n >= 5 ? n - 5 : 0].delta;
  if (r.final_delta >= 0.9 * earlier) {
    r.verdict = Verdict::fail;
    r.reason = FailReason::non_vanishing;
  }
  return r;
}

SmallnessReport holder_smallness(const Driver& d, double t, std::span<const double> scales) {
  SmallnessReport r;
  r.t = t;
  r.holds = true;
  for (double s : scales) {
    if (!(s > 0.0) || s > t) throw DomainError("holder_smallness: scale outside (0, t]");
    const auto e = d.form().energy(t - s, t);
    if (!e) throw DomainError("holder_smallness: driver has no closed-form energy");
    const double v = d.total_variation(t - s, t);
    const double b = std::sqrt(s * *e);
    r.scales.push_back(s);
    r.variation.push_back(v);
    r.bound.push_back(b);
    r.ratio_to_sqrt.push_back(v / std::sqrt(s));
    if (v > b * (1.0 + 1e-9) + 1e-15) r.holds = false;
  }
  return r;
}

nlohmann::json to_json(const C1Report& r) {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : r.probes)
    probes.push_back({{"t", p.t},
                      {"verdict", to_string(p.verdict)},
                      {"estimate", p.estimate},
                      {"floor", p.floor},
                      {"floor_limited", p.floor_limited},
                      {"smallest_scale", p.scales.empty() ? 0.0 : p.scales.back()}});
  return {{"verdict", to_string(r.verdict)}, {"max_estimate", r.max_estimate}, {"probes", probes}};
}

nlohmann::json to_json(const C2Report& r) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : r.curve)
    curve.push_back({{"eps", p.eps}, {"delta", p.delta}, {"argmax_t", p.argmax_t}});
  nlohmann::json j{{"verdict", to_string(r.verdict)},
                   {"reason", to_string(r.reason)},
                   {"final_delta", r.final_delta},
                   {"tolerance", r.tolerance},
                   {"t_grid_size", r.t_grid.size()},
                   {"delta_curve", curve}};
  if (r.divergent_at) j["divergent_at"] = *r.divergent_at;
  return j;
}

nlohmann::json to_json(const SmallnessReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < r.scales.size(); ++k)
    rows.push_back({{"s", r.scales[k]},
                    {"variation", r.variation[k]},
                    {"bound", r.bound[k]},
                    {"variation_over_sqrt_s", r.ratio_to_sqrt[k]}});
  return {{"t", r.t}, {"holds", r.holds}, {"rows", rows}};
}

}  // namespace loewner
