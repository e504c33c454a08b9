#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace loewner {

/// A continuous real function on [0, T] with U(0) = 0 and finite total variation.
///
/// Implementations are immutable; every method must be safe to call concurrently.
class DriverForm {
 public:
  virtual ~DriverForm() = default;

  virtual double value(double t) const = 0;
  /// Total variation on [a, b], a <= b.
  virtual double variation(double a, double b) const = 0;
  /// Times in (0, T) where the form is not smooth. Integrators stop on them.
  virtual std::vector<double> breakpoints() const { return {}; }
  virtual std::string family() const = 0;
  virtual nlohmann::json params() const = 0;
  /// True when variation() is closed form (or an exact knot sum).
  virtual bool exact_variation() const { return true; }
  /// Dirichlet energy of U on [a, b] when a closed form is available.
  virtual std::optional<double> energy(double /*a*/, double /*b*/) const { return std::nullopt; }
  /// Smallest left scale at t carrying information: the knot spacing for sampled forms,
  /// 0 for closed forms. Scales below it only see the linear interpolant.
  virtual double resolution(double /*t*/) const { return 0.0; }
};

using Knot = std::pair<double, double>;

class Driver {
 public:
  Driver(std::shared_ptr<const DriverForm> form, double horizon);

  double horizon() const noexcept { return horizon_; }
  const DriverForm& form() const noexcept { return *form_; }
  std::shared_ptr<const DriverForm> form_ptr() const noexcept { return form_; }

  /// U(t); throws DomainError outside [0, T] (with a 1e-12 relative slack).
  double value(double t) const;
  /// V(t) = |U|_TV on [0, t].
  double variation(double t) const { return total_variation(0.0, t); }
  double total_variation(double a, double b) const;
  /// Interior breakpoints restricted to (0, T), sorted.
  std::vector<double> breakpoints() const;
  double resolution(double t) const { return form_->resolution(t); }
  std::string family() const { return form_->family(); }
  nlohmann::json params() const { return form_->params(); }

 private:
  std::shared_ptr<const DriverForm> form_;
  double horizon_;
};

/// total_variation(d, [a, b]) with the domain checks of the public contract.
double total_variation(const Driver& d, double a, double b);

/// beta_s = U(t) - U(t - s) for s in [0, span], span <= t.
class ReversedIncrement {
 public:
  ReversedIncrement(Driver base, double anchor, double span);

  const Driver& base() const noexcept { return base_; }
  double anchor() const noexcept { return anchor_; }
  double span() const noexcept { return span_; }

  double value(double s) const;
  /// |beta|_TV on [0, s] = V(t) - V(t - s).
  double variation(double s) const;
  /// |beta|_TV on [r, s].
  double variation(double r, double s) const;
  /// Offsets in (0, span) mapped from the driver's breakpoints, sorted.
  std::vector<double> breakpoints() const;

 private:
  Driver base_;
  double anchor_;
  double span_;
  double u_anchor_;
};

/// Reversed increment anchored at t over the whole of [0, t].
ReversedIncrement reversed_increment(const Driver& d, double t);

// Concrete forms. Most callers go through make_example() instead.

std::shared_ptr<const DriverForm> make_zero_form();
std::shared_ptr<const DriverForm> make_sqrt_form(double c);
std::shared_ptr<const DriverForm> make_logsqrt_form();
std::shared_ptr<const DriverForm> make_power_form(double c, double alpha);
std::shared_ptr<const DriverForm> make_spiral_form();
/// Piecewise-linear interpolation of knots. family/params label the origin.
std::shared_ptr<const DriverForm> make_samples_form(std::vector<Knot> knots,
                                                    std::string family = "samples",
                                                    nlohmann::json params = nlohmann::json::object());
/// base + scale * perturbation. Variation by refinement of partition sums.
std::shared_ptr<const DriverForm> make_sum_form(std::shared_ptr<const DriverForm> base,
                                                std::shared_ptr<const DriverForm> perturbation,
                                                double scale);
/// sin^2 bump of unit height on [start, start + width]; total variation 2.
std::shared_ptr<const DriverForm> make_bump_form(double start, double width);
/// One-sided average of U over [t - width, t] (U extended by 0 for negative times).
std::shared_ptr<const DriverForm> make_mollified_form(std::shared_ptr<const DriverForm> base,
                                                      double width);

/// TV on [a, b] of an arbitrary form by partition refinement with Richardson correction.
double refined_variation(const DriverForm& f, double a, double b, std::span<const double> breaks,
                         double rel_tol = 1e-12);

}  // namespace loewner
