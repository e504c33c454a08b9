#include "loewner/gallery.hpp"

#include <cmath>
#include <random>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

double param(const nlohmann::json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number()) throw DomainError(std::string("parameter '") + key + "' must be a number");
  return p.at(key).get<double>();
}

// Extend a knot list that ends at `end` with a constant piece up to the horizon.
void pad_to(std::vector<Knot>& knots, double horizon) {
  if (horizon > knots.back().first) knots.emplace_back(horizon, knots.back().second);
}

}  // namespace

MonotoneBvlrLevels monotone_bvlr_levels(double c, double alpha, double eps, double scale) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("monotone_bvlr: c must lie in (0, 1)");
  if (!(alpha > 0.5)) throw DomainError("monotone_bvlr: alpha must exceed 1/2");
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("monotone_bvlr: eps must lie in (0, 1/2)");
  if (!(scale > 0.0 && scale <= 1.0)) throw DomainError("monotone_bvlr: scale must lie in (0, 1]");
  // x_n = scale * (1 - c^{n alpha}) so that x - x_n = scale * c^{n alpha} <= (1 - s_n)^alpha.
  MonotoneBvlrLevels lv;
  lv.limit = scale;
  const double expo = 1.0 / (0.5 - eps);
  for (int n = 0;; ++n) {
    const double sn = 1.0 - std::pow(c, n);
    const double sn1 = 1.0 - std::pow(c, n + 1);
    const double xn = scale * (1.0 - std::pow(c, n * alpha));
    const double xn1 = scale * (1.0 - std::pow(c, (n + 1) * alpha));
    // (t_n - s_n)^{1/2 - eps} = (x_{n+1} - x_n) / 2 < x_{n+1} - x_n, kept inside (s_n, s_{n+1}).
    const double len = std::min(std::pow(0.5 * (xn1 - xn), expo), 0.5 * (sn1 - sn));
    if (len < 1e-13 || 1.0 - sn1 < 1e-12) break;
    lv.s.push_back(sn);
    lv.t.push_back(sn + len);
    lv.x.push_back(xn);
  }
  return lv;
}

Driver make_example(const std::string& name, const nlohmann::json& params) {
  const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
  const double horizon = param(p, "horizon", 1.0);
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");

  if (name == "zero") return Driver(make_zero_form(), horizon);
  if (name == "sqrt") return Driver(make_sqrt_form(param(p, "c", 1.0)), horizon);
  if (name == "logsqrt") return Driver(make_logsqrt_form(), horizon);
  if (name == "power") {
    const double alpha = param(p, "alpha", 0.75);
    if (!(alpha > 0.5)) throw DomainError("power: alpha must exceed 1/2");
    return Driver(make_power_form(param(p, "c", 1.0), alpha), horizon);
  }
  if (name == "spiral") return Driver(make_spiral_form(), horizon);
  if (name == "monotone_bvlr") {
    const double c = param(p, "c", 0.5);
    const double alpha = param(p, "alpha", 0.75);
    const double eps = param(p, "eps", 0.1);
    const double scale = param(p, "scale", 1.0);
    if (horizon < 1.0) throw DomainError("monotone_bvlr: horizon must be at least 1");
    const auto lv = monotone_bvlr_levels(c, alpha, eps, scale);
    std::vector<Knot> knots;
    for (std::size_t n = 0; n < lv.s.size(); ++n) {
      knots.emplace_back(lv.s[n], lv.x[n]);
      knots.emplace_back(lv.t[n], lv.x[n] + std::pow(lv.t[n] - lv.s[n], 0.5 - eps));
    }
    knots.emplace_back(1.0, lv.limit);
    pad_to(knots, horizon);
    return Driver(make_samples_form(std::move(knots), "monotone_bvlr",
                                    {{"c", c}, {"alpha", alpha}, {"eps", eps}, {"scale", scale}}),
                  horizon);
  }
  if (name == "random") {
    const auto seed = static_cast<std::uint64_t>(param(p, "seed", 7));
    const int count = static_cast<int>(param(p, "knots", 16));
    const double amplitude = param(p, "amplitude", 0.25);
    if (count < 1) throw DomainError("random: need at least one segment");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Knot> knots{{0.0, 0.0}};
    const double dt = horizon / count;
    for (int k = 1; k <= count; ++k)
      knots.emplace_back(k == count ? horizon : k * dt,
                         knots.back().second + amplitude * std::sqrt(dt) * unit(rng));
    return Driver(make_samples_form(std::move(knots), "random",
                                    {{"seed", seed}, {"knots", count}, {"amplitude", amplitude}}),
                  horizon);
  }
  if (name == "ramp") {
    const double at = param(p, "at", 0.5 * horizon);
    const double width = param(p, "width", 1e-6);
    const double factor = param(p, "factor", 3.0);
    if (!(width > 0.0 && width < at && at <= horizon)) throw DomainError("ramp: need 0 < width < at <= T");
    std::vector<Knot> knots{{0.0, 0.0}, {at - width, 0.0}, {at, factor * std::sqrt(width)}};
    pad_to(knots, horizon);
    return Driver(make_samples_form(std::move(knots), "ramp",
                                    {{"at", at}, {"width", width}, {"factor", factor}}),
                  horizon);
  }
  throw DomainError("unknown gallery driver '" + name + "'");
}

const std::vector<GalleryEntry>& gallery_entries() {
  static const std::vector<GalleryEntry> entries{
      {"zero", "U = 0 (vertical slit)", nlohmann::json::object(), true},
      {"sqrt", "U = c sqrt(t) (straight ray)", {{"c", 1.0}}, true},
      {"logsqrt", "U = 4 sqrt(t) - 2 sqrt(t) log t", nlohmann::json::object(), true},
      {"power", "U = c t^alpha, alpha > 1/2", {{"c", 1.0}, {"alpha", 0.75}}, true},
      {"monotone_bvlr", "monotone BV_LR driver with infinite 1/2-Hoelder norm",
       {{"c", 0.5}, {"alpha", 0.75}, {"eps", 0.1}, {"scale", 1.0}}, true},
      {"spiral", "finite-energy driver whose trace spirals at t = 1", nlohmann::json::object(), true},
      {"random", "seeded random piecewise-linear driver",
       {{"seed", 7}, {"knots", 16}, {"amplitude", 0.25}}, true},
      {"ramp", "steep ramp violating the left-local condition at `at`",
       {{"width", 1e-6}, {"factor", 3.0}}, false},
  };
  return entries;
}

std::vector<Driver> bvlr_gallery() {
  std::vector<Driver> out;
  for (const auto& e : gallery_entries())
    if (e.bv_lr) out.push_back(make_example(e.name, e.defaults));
  return out;
}

}  // namespace loewner
