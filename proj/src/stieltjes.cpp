#include "loewner/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

std::vector<double> make_nodes(double a, double b, int n, double grading,
                               std::span<const double> breaks) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(n) + breaks.size() + 1);
  for (int k = 0; k <= n; ++k)
    x.push_back(k == n ? b : a + (b - a) * std::pow(static_cast<double>(k) / n, grading));
  for (double br : breaks)
    if (br > a && br < b) x.push_back(br);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}

template <class CellSum>
StieltjesResult refine(double a, double b, std::span<const double> breaks,
                       const StieltjesOptions& opts, CellSum&& cell_sum) {
  if (b < a) throw DomainError("Stieltjes integral: empty interval");
  if (b == a) return {cplx{}, 0.0, 0};
  int n = std::max(1, opts.initial_cells);
  cplx coarse = cell_sum(make_nodes(a, b, n, opts.grading, breaks));
  cplx best = coarse;
  double err = std::abs(coarse);
  while (2 * n <= opts.max_cells) {
    n *= 2;
    const cplx fine = cell_sum(make_nodes(a, b, n, opts.grading, breaks));
    const cplx diff = fine - coarse;
    best = fine + diff / 3.0;
    err = std::abs(diff) / 3.0;
    if (err <= opts.abs_tol + opts.rel_tol * std::abs(fine)) break;
    coarse = fine;
  }
  return {best, err, n};
}

}  // namespace

StieltjesResult stieltjes_integral(const Integrand& f, const Integrator& g, double a, double b,
                                   std::span<const double> breaks, const StieltjesOptions& opts) {
  return refine(a, b, breaks, opts, [&](const std::vector<double>& x) {
    cplx acc{};
    double g0 = g(x.front());
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double g1 = g(x[k + 1]);
      acc += f(0.5 * (x[k] + x[k + 1])) * (g1 - g0);
      g0 = g1;
    }
    return acc;
  });
}

StieltjesResult stieltjes_integral(const Integrand& f, const ReversedIncrement& beta, double lo,
                                   double hi, const StieltjesOptions& opts) {
  const auto br = beta.breakpoints();
  return stieltjes_integral(f, [&](double s) { return beta.value(s); }, lo, hi, br, opts);
}

StieltjesResult stieltjes_integral_variation(const Integrand& f, const ReversedIncrement& beta,
                                             double lo, double hi, const StieltjesOptions& opts) {
  const auto br = beta.breakpoints();
  // Increments of |beta| taken relative to lo keep cancellation out of tiny cells.
  return stieltjes_integral(f, [&](double s) { return beta.variation(lo, s); }, lo, hi, br, opts);
}

StieltjesResult singular_stieltjes_integral(const Integrand& w, const Integrator& g, double a,
                                            double b, std::span<const double> breaks,
                                            const StieltjesOptions& opts) {
  return refine(a, b, breaks, opts, [&](const std::vector<double>& x) {
    cplx acc{};
    double g0 = g(x.front());
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double g1 = g(x[k + 1]);
      const double weight = 2.0 * (g1 - g0) / (std::sqrt(x[k] - a) + std::sqrt(x[k + 1] - a));
      acc += w(0.5 * (x[k] + x[k + 1])) * weight;
      g0 = g1;
    }
    return acc;
  });
}

}  // namespace loewner
