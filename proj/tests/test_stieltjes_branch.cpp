#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "loewner/branch.hpp"
#include "loewner/gallery.hpp"
#include "loewner/stieltjes.hpp"

using namespace loewner;
using Catch::Approx;

TEST_CASE("stieltjes integral against beta telescopes") {
  const auto beta = reversed_increment(make_example("logsqrt"), 0.8);
  for (double s : {0.1, 0.5, 0.8}) {
    const auto r = stieltjes_integral([](double) { return cplx(1.0); }, beta, 0.0, s);
    CHECK(std::abs(r.value - beta.value(s)) <= 1e-13);
  }
}

TEST_CASE("stieltjes integral of r against ds") {
  const auto r = stieltjes_integral([](double x) { return cplx(x); }, [](double x) { return x; }, 0.0, 1.0);
  CHECK(r.value.real() == Approx(0.5).epsilon(1e-12));
  CHECK(r.value.imag() == 0.0);
}

TEST_CASE("piecewise-linear integrators are exact per segment") {
  const Driver d(make_samples_form({{0, 0}, {0.3, 0.6}, {0.7, -0.2}, {1, 0.1}}), 1.0);
  const auto beta = reversed_increment(d, 1.0);
  // f linear, beta linear on each cell: the midpoint rule is exact.
  const auto r = stieltjes_integral([](double s) { return cplx(2.0 * s + 1.0); }, beta, 0.0, 1.0);
  // beta' = -U'(1 - s): slopes 1 on [0, .3], -2 on [.3, .7], 2 on [.7, 1] (in s).
  auto piece = [](double lo, double hi, double slope) {
    return slope * ((hi * hi + hi) - (lo * lo + lo));
  };
  const double exact = piece(0, 0.3, 1.0) + piece(0.3, 0.7, -2.0) + piece(0.7, 1.0, 2.0);
  CHECK(r.value.real() == Approx(exact).epsilon(1e-13));
}

TEST_CASE("singular integral against the variation of c sqrt(t)") {
  const double c = 3.0;
  const auto beta = reversed_increment(make_example("sqrt", {{"c", c}}), 1.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double eps : {0.5, 0.1, 1e-3}) {
    const auto r = singular_stieltjes_integral([](double) { return cplx(1.0); },
                                               [&](double s) { return beta.variation(s); }, 0.0, eps);
    const double oracle = c * ts.integrate([](double x) { return 1.0 / (std::sqrt(x) * 2.0 * std::sqrt(1.0 - x)); }, 0.0, eps);
    CHECK(r.value.real() == Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("stieltjes integral is linear and additive") {
  const auto beta = reversed_increment(make_example("power"), 1.0);
  auto f = [](double s) { return cplx(std::cos(3 * s), s * s); };
  auto g = [](double s) { return cplx(1.0 - s, 0.5); };
  const auto whole_f = stieltjes_integral(f, beta, 0.0, 1.0).value;
  const auto whole_g = stieltjes_integral(g, beta, 0.0, 1.0).value;
  const auto combo = stieltjes_integral([&](double s) { return 2.0 * f(s) - 3.0 * g(s); }, beta, 0.0, 1.0).value;
  CHECK(std::abs(combo - (2.0 * whole_f - 3.0 * whole_g)) <= 1e-10);
  const auto left = stieltjes_integral(f, beta, 0.0, 0.4).value;
  const auto right = stieltjes_integral(f, beta, 0.4, 1.0).value;
  CHECK(std::abs(whole_f - left - right) <= 1e-10);
}

TEST_CASE("branch square root rule") {
  CHECK(branch_sqrt_step({0, 2}, -4.0) == cplx(0, 2));
  CHECK(branch_sqrt_step({1, 1e-3}, 1.0) == cplx(1, 0));
  CHECK(branch_sqrt_step({-1, 1e-3}, 1.0) == cplx(-1, 0));
  CHECK(upper_sqrt(cplx(-4, 0)) == cplx(0, 2));
  CHECK(upper_sqrt(cplx(0, -2)).imag() >= 0.0);
}

TEST_CASE("branch steps along random walks near the cut") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0.0, 1.0);
  const double guard = kDefaultBranchGuard;
  for (int walk = 0; walk < 50; ++walk) {
    // Each walk keeps to one closed half-plane, so it touches (0, inf) without crossing it,
    // like the solutions of the reverse equation.
    const double side = walk % 2 ? 1.0 : -1.0;
    cplx phi(2.0, side * 1e-3 * std::abs(n(rng)));
    cplx a = upper_sqrt(phi);
    for (int k = 0; k < 400; ++k) {
      // Steps of size 1e-3 with an occasional landing exactly on the cut.
      cplx next = phi + 1e-3 * cplx(n(rng), n(rng));
      next.imag(side * std::abs(next.imag()));
      if (k % 37 == 0) next = cplx(std::abs(next.real()), 0.0);
      const cplx b = branch_sqrt_step(a, next, guard);
      INFO("walk " << walk << " step " << k);
      CHECK(std::abs(b * b - next) <= 1e-12 * (1.0 + std::abs(next)));
      CHECK(b.imag() >= 0.0);
      // Brute force: both admissible roots, pick by the rule.
      const cplx u = upper_sqrt(next), v = -std::conj(u);
      cplx expect = u;
      if (distance_to_cut(next) <= guard * (1.0 + std::abs(next)) && std::abs(v - a) < std::abs(u - a)) expect = v;
      CHECK(b == expect);
      // Without a crossing the root moves continuously: |db| <= sqrt|dphi|.
      CHECK(std::abs(b - a) <= std::sqrt(std::abs(next - phi)) * (1 + 1e-9) + 1e-12);
      phi = next;
      a = b;
    }
  }
}
