#include "loewner/driver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

constexpr double kSlack = 1e-12;

class ZeroForm final : public DriverForm {
 public:
  double value(double) const override { return 0.0; }
  double variation(double, double) const override { return 0.0; }
  std::string family() const override { return "zero"; }
  nlohmann::json params() const override { return nlohmann::json::object(); }
  std::optional<double> energy(double, double) const override { return 0.0; }
};

class SqrtForm final : public DriverForm {
 public:
  explicit SqrtForm(double c) : c_(c) {}
  double value(double t) const override { return c_ * std::sqrt(t); }
  double variation(double a, double b) const override {
    return std::abs(c_) * (std::sqrt(b) - std::sqrt(a));
  }
  std::string family() const override { return "sqrt"; }
  nlohmann::json params() const override { return {{"c", c_}}; }

 private:
  double c_;
};

// U(t) = 4 sqrt(t) - 2 sqrt(t) log(t). U' = -log(t)/sqrt(t): increasing on (0, 1), decreasing after.
class LogSqrtForm final : public DriverForm {
 public:
  double value(double t) const override {
    if (t <= 0.0) return 0.0;
    return std::sqrt(t) * (4.0 - 2.0 * std::log(t));
  }
  double variation(double a, double b) const override { return cumulative(b) - cumulative(a); }
  std::string family() const override { return "logsqrt"; }
  nlohmann::json params() const override { return nlohmann::json::object(); }

 private:
  double cumulative(double t) const { return t <= 1.0 ? value(t) : 8.0 - value(t); }
};

class PowerForm final : public DriverForm {
 public:
  PowerForm(double c, double alpha) : c_(c), alpha_(alpha) {}
  double value(double t) const override { return t <= 0.0 ? 0.0 : c_ * std::pow(t, alpha_); }
  double variation(double a, double b) const override {
    return std::abs(c_) * (std::pow(b, alpha_) - std::pow(a, alpha_));
  }
  std::string family() const override { return "power"; }
  nlohmann::json params() const override { return {{"c", c_}, {"alpha", alpha_}}; }

 private:
  double c_;
  double alpha_;
};

// beta(s) = int_0^s dr / (sqrt(r) log r) = li(sqrt(s)) = Ei(log(s) / 2), valid for s <= 1/2.
double spiral_beta(double s) {
  if (s <= 0.0) return 0.0;
  return std::expint(0.5 * std::log(s));
}
double spiral_beta_prime(double s) { return 1.0 / (std::sqrt(s) * std::log(s)); }

// Linear on [0, 1/2] with the slope matching at 1/2, then U(1) - U(1 - s) = beta(s), constant
// after 1. Monotone decreasing on [0, 1].
class SpiralForm final : public DriverForm {
 public:
  SpiralForm()
      : slope_(spiral_beta_prime(0.5)), u_half_(0.5 * slope_), u_one_(u_half_ + spiral_beta(0.5)) {}

  double value(double t) const override {
    if (t <= 0.5) return slope_ * t;
    if (t >= 1.0) return u_one_;
    return u_one_ - spiral_beta(1.0 - t);
  }
  double variation(double a, double b) const override { return value(a) - value(b); }
  std::vector<double> breakpoints() const override { return {0.5, 1.0}; }
  std::string family() const override { return "spiral"; }
  nlohmann::json params() const override { return nlohmann::json::object(); }
  std::optional<double> energy(double a, double b) const override {
    double e = 0.0;
    const double l0 = std::min(b, 0.5);
    if (l0 > a) e += slope_ * slope_ * (l0 - a);
    const double m0 = std::max(a, 0.5);
    const double m1 = std::min(b, 1.0);
    if (m1 > m0) {
      // int beta'(r)^2 dr = [-1 / log r], with r = 1 - t running over [1 - m1, 1 - m0].
      auto prim = [](double r) { return r <= 0.0 ? 0.0 : -1.0 / std::log(r); };
      e += prim(1.0 - m0) - prim(1.0 - m1);
    }
    return e;
  }

 private:
  double slope_;
  double u_half_;
  double u_one_;
};

class SamplesForm final : public DriverForm {
 public:
  SamplesForm(std::vector<Knot> knots, std::string family, nlohmann::json params)
      : knots_(std::move(knots)), family_(std::move(family)), params_(std::move(params)) {
    if (knots_.size() < 2) throw DomainError("samples driver needs at least two knots");
    if (knots_.front().first != 0.0 || knots_.front().second != 0.0)
      throw DomainError("samples driver must start at knot (0, 0)");
    cumulative_.resize(knots_.size(), 0.0);
    for (std::size_t k = 1; k < knots_.size(); ++k) {
      if (!(knots_[k].first > knots_[k - 1].first))
        throw DomainError("knot times must be strictly increasing");
      cumulative_[k] = cumulative_[k - 1] + std::abs(knots_[k].second - knots_[k - 1].second);
    }
  }

  double value(double t) const override {
    const std::size_t k = segment(t);
    const auto& [t0, u0] = knots_[k];
    const auto& [t1, u1] = knots_[k + 1];
    return u0 + (u1 - u0) * ((t - t0) / (t1 - t0));
  }
  double variation(double a, double b) const override { return cumulative(b) - cumulative(a); }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    out.reserve(knots_.size());
    for (std::size_t k = 1; k + 1 < knots_.size(); ++k) out.push_back(knots_[k].first);
    return out;
  }
  std::string family() const override { return family_; }
  nlohmann::json params() const override {
    nlohmann::json p = params_;
    if (family_ == "samples") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& [t, u] : knots_) arr.push_back({t, u});
      p["knots"] = arr;
    }
    return p;
  }
  std::optional<double> energy(double a, double b) const override {
    double e = 0.0;
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
      const double lo = std::max(a, knots_[k].first);
      const double hi = std::min(b, knots_[k + 1].first);
      if (hi <= lo) continue;
      const double slope =
          (knots_[k + 1].second - knots_[k].second) / (knots_[k + 1].first - knots_[k].first);
      e += slope * slope * (hi - lo);
    }
    return e;
  }

  double resolution(double t) const override {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t,
                               [](const Knot& k, double x) { return k.first < x; });
    if (it == knots_.begin()) return knots_[1].first;
    return t - std::prev(it)->first;
  }

  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::size_t segment(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double x, const Knot& k) { return x < k.first; });
    std::size_t k = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    k = k == 0 ? 0 : k - 1;
    return std::min(k, knots_.size() - 2);
  }
  double cumulative(double t) const {
    const std::size_t k = segment(t);
    const auto& [t0, u0] = knots_[k];
    const auto& [t1, u1] = knots_[k + 1];
    return cumulative_[k] + std::abs(u1 - u0) * ((t - t0) / (t1 - t0));
  }

  std::vector<Knot> knots_;
  std::vector<double> cumulative_;
  std::string family_;
  nlohmann::json params_;
};

class SumForm final : public DriverForm {
 public:
  SumForm(std::shared_ptr<const DriverForm> base, std::shared_ptr<const DriverForm> pert,
          double scale)
      : base_(std::move(base)), pert_(std::move(pert)), scale_(scale) {}

  double value(double t) const override { return base_->value(t) + scale_ * pert_->value(t); }
  double variation(double a, double b) const override {
    if (scale_ == 0.0) return base_->variation(a, b);
    const auto br = breakpoints();
    return refined_variation(*this, a, b, br);
  }
  std::vector<double> breakpoints() const override {
    auto out = base_->breakpoints();
    const auto p = pert_->breakpoints();
    out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  bool exact_variation() const override { return scale_ == 0.0 && base_->exact_variation(); }
  double resolution(double t) const override {
    return std::max(base_->resolution(t), pert_->resolution(t));
  }
  std::string family() const override { return "sum"; }
  nlohmann::json params() const override {
    return {{"base", {{"family", base_->family()}, {"params", base_->params()}}},
            {"perturbation", {{"family", pert_->family()}, {"params", pert_->params()}}},
            {"scale", scale_}};
  }

 private:
  std::shared_ptr<const DriverForm> base_;
  std::shared_ptr<const DriverForm> pert_;
  double scale_;
};

class BumpForm final : public DriverForm {
 public:
  BumpForm(double start, double width) : start_(start), width_(width) {}
  double value(double t) const override {
    if (t <= start_ || t >= start_ + width_) return 0.0;
    const double s = std::sin(std::numbers::pi * (t - start_) / width_);
    return s * s;
  }
  double variation(double a, double b) const override { return cumulative(b) - cumulative(a); }
  std::vector<double> breakpoints() const override {
    return {start_, start_ + 0.5 * width_, start_ + width_};
  }
  std::string family() const override { return "bump"; }
  nlohmann::json params() const override { return {{"start", start_}, {"width", width_}}; }

 private:
  double cumulative(double t) const {
    const double mid = start_ + 0.5 * width_;
    if (t <= start_) return 0.0;
    if (t <= mid) return value(t);
    if (t < start_ + width_) return 2.0 - value(t);
    return 2.0;
  }
  double start_;
  double width_;
};

class MollifiedForm final : public DriverForm {
 public:
  MollifiedForm(std::shared_ptr<const DriverForm> base, double width)
      : base_(std::move(base)), width_(width) {}
  double value(double t) const override {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const double half = 0.5 * width_;
    const double avg = Rule::integrate(
        [&](double x) {
          const double tau = t - (half + half * x);
          return tau <= 0.0 ? 0.0 : base_->value(tau);
        },
        -1.0, 1.0);
    return 0.5 * avg;
  }
  double variation(double a, double b) const override {
    const auto br = breakpoints();
    return refined_variation(*this, a, b, br);
  }
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }
  bool exact_variation() const override { return false; }
  double resolution(double t) const override { return base_->resolution(t); }
  std::string family() const override { return "mollified"; }
  nlohmann::json params() const override {
    return {{"base", {{"family", base_->family()}, {"params", base_->params()}}},
            {"width", width_}};
  }

 private:
  std::shared_ptr<const DriverForm> base_;
  double width_;
};

}  // namespace

double refined_variation(const DriverForm& f, double a, double b, std::span<const double> breaks,
                         double rel_tol) {
  if (b <= a) return 0.0;
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p];
    const double hi = cuts[p + 1];
    auto partition_sum = [&](int n) {
      double acc = 0.0;
      double prev = f.value(lo);
      for (int k = 1; k <= n; ++k) {
        const double x = k == n ? hi : lo + (hi - lo) * k / n;
        const double v = f.value(x);
        acc += std::abs(v - prev);
        prev = v;
      }
      return acc;
    };
    double coarse = partition_sum(4);
    double est = coarse;
    for (int n = 8; n <= (1 << 16); n *= 2) {
      const double fine = partition_sum(n);
      const double diff = fine - coarse;
      est = fine + diff / 3.0;
      if (std::abs(diff) <= rel_tol * std::max(fine, 1e-300)) break;
      coarse = fine;
    }
    total += est;
  }
  return total;
}

Driver::Driver(std::shared_ptr<const DriverForm> form, double horizon)
    : form_(std::move(form)), horizon_(horizon) {
  if (!form_) throw DomainError("driver form is null");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw DomainError("driver horizon must be positive and finite");
}

namespace {
double clamp_time(double t, double horizon, const char* what) {
  const double slack = kSlack * std::max(1.0, horizon);
  if (t < -slack || t > horizon + slack || std::isnan(t))
    throw DomainError(std::string(what) + ": time " + std::to_string(t) + " outside [0, " +
                      std::to_string(horizon) + "]");
  return std::clamp(t, 0.0, horizon);
}
}  // namespace

double Driver::value(double t) const { return form_->value(clamp_time(t, horizon_, "value")); }

double Driver::total_variation(double a, double b) const {
  if (a > b) throw DomainError("total_variation: empty interval (a > b)");
  a = clamp_time(a, horizon_, "total_variation");
  b = clamp_time(b, horizon_, "total_variation");
  return std::max(0.0, form_->variation(a, b));
}

std::vector<double> Driver::breakpoints() const {
  auto br = form_->breakpoints();
  std::erase_if(br, [&](double x) { return !(x > 0.0 && x < horizon_); });
  std::sort(br.begin(), br.end());
  return br;
}

double total_variation(const Driver& d, double a, double b) { return d.total_variation(a, b); }

ReversedIncrement::ReversedIncrement(Driver base, double anchor, double span)
    : base_(std::move(base)), anchor_(anchor), span_(span), u_anchor_(0.0) {
  if (!(anchor_ > 0.0) || anchor_ > base_.horizon() * (1.0 + kSlack))
    throw DomainError("reversed increment: anchor " + std::to_string(anchor_) + " outside (0, T]");
  anchor_ = std::min(anchor_, base_.horizon());
  if (!(span_ > 0.0) || span_ > anchor_ * (1.0 + kSlack))
    throw DomainError("reversed increment: span must lie in (0, anchor]");
  span_ = std::min(span_, anchor_);
  u_anchor_ = base_.value(anchor_);
}

double ReversedIncrement::value(double s) const {
  return u_anchor_ - base_.value(std::max(0.0, anchor_ - s));
}

double ReversedIncrement::variation(double s) const {
  return base_.total_variation(std::max(0.0, anchor_ - s), anchor_);
}

double ReversedIncrement::variation(double r, double s) const {
  return base_.total_variation(std::max(0.0, anchor_ - s), std::max(0.0, anchor_ - r));
}

std::vector<double> ReversedIncrement::breakpoints() const {
  std::vector<double> out;
  for (double b : base_.breakpoints()) {
    const double s = anchor_ - b;
    if (s > 0.0 && s < span_) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ReversedIncrement reversed_increment(const Driver& d, double t) {
  if (!(t > 0.0) || t > d.horizon() * (1.0 + kSlack))
    throw DomainError("reversed_increment: t must lie in (0, T]");
  return ReversedIncrement(d, t, t);
}

std::shared_ptr<const DriverForm> make_zero_form() { return std::make_shared<ZeroForm>(); }
std::shared_ptr<const DriverForm> make_sqrt_form(double c) {
  if (c == 0.0) return make_zero_form();
  return std::make_shared<SqrtForm>(c);
}
std::shared_ptr<const DriverForm> make_logsqrt_form() { return std::make_shared<LogSqrtForm>(); }
std::shared_ptr<const DriverForm> make_power_form(double c, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("power driver needs alpha > 0");
  return std::make_shared<PowerForm>(c, alpha);
}
std::shared_ptr<const DriverForm> make_spiral_form() { return std::make_shared<SpiralForm>(); }
std::shared_ptr<const DriverForm> make_samples_form(std::vector<Knot> knots, std::string family,
                                                    nlohmann::json params) {
  return std::make_shared<SamplesForm>(std::move(knots), std::move(family), std::move(params));
}
std::shared_ptr<const DriverForm> make_sum_form(std::shared_ptr<const DriverForm> base,
                                                std::shared_ptr<const DriverForm> perturbation,
                                                double scale) {
  return std::make_shared<SumForm>(std::move(base), std::move(perturbation), scale);
}
std::shared_ptr<const DriverForm> make_bump_form(double start, double width) {
  if (!(start > 0.0) || !(width > 0.0)) throw DomainError("bump needs start > 0 and width > 0");
  return std::make_shared<BumpForm>(start, width);
}
std::shared_ptr<const DriverForm> make_mollified_form(std::shared_ptr<const DriverForm> base,
                                                      double width) {
  if (!(width > 0.0)) throw DomainError("mollifier width must be positive");
  return std::make_shared<MollifiedForm>(std::move(base), width);
}

}  // namespace loewner
