#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "loewner/driver.hpp"
#include "loewner/driver_io.hpp"
#include "loewner/errors.hpp"
#include "loewner/gallery.hpp"

using namespace loewner;
using Catch::Approx;

TEST_CASE("total variation of a piecewise-linear driver is the increment sum") {
  const Driver d(make_samples_form({{0, 0}, {1, 1}, {2, 0}}), 2.0);
  CHECK(total_variation(d, 0, 2) == 2.0);
  CHECK(total_variation(d, 0.5, 1.5) == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(total_variation(d, -0.1, 1), DomainError);
  CHECK_THROWS_AS(total_variation(d, 0, 2.5), DomainError);
  CHECK_THROWS_AS(total_variation(d, 1.5, 1), DomainError);
}

TEST_CASE("monotone closed forms") {
  const Driver d = make_example("sqrt", {{"c", 3.0}});
  CHECK(total_variation(d, 0, 1) == Approx(3.0).epsilon(1e-15));
  CHECK(total_variation(d, 0.25, 1) == Approx(std::abs(d.value(1) - d.value(0.25))).epsilon(1e-14));
}

TEST_CASE("logsqrt variation matches quadrature of |U'|") {
  const double e2 = std::exp(2.0);
  const Driver d = make_example("logsqrt", {{"horizon", e2}});
  // U' = -log(t) / sqrt(t): integrable singularity at 0, sign change at 1.
  boost::math::quadrature::tanh_sinh<double> ts;
  auto abs_du = [](double t) { return std::abs(std::log(t)) / std::sqrt(t); };
  for (double b : {0.3, 1.0, 2.5, e2}) {
    double oracle = ts.integrate(abs_du, 0.0, std::min(b, 1.0));
    if (b > 1.0) oracle += ts.integrate(abs_du, 1.0, b);
    CHECK(total_variation(d, 0, b) == Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("variation is additive and dominates increments") {
  for (const Driver& d : bvlr_gallery()) {
    INFO(d.family());
    const double T = d.horizon();
    for (double a : {0.0, 0.1 * T, 0.37 * T})
      for (double b : {0.5 * T, 0.61 * T})
        for (double c : {0.8 * T, T}) {
          const double whole = total_variation(d, a, c);
          const double parts = total_variation(d, a, b) + total_variation(d, b, c);
          CHECK(std::abs(whole - parts) <= 1e-12 * std::max(1.0, whole));
          CHECK(std::abs(d.value(c) - d.value(a)) <= whole + 1e-13);
        }
  }
}

TEST_CASE("inserting collinear knots changes nothing") {
  const Driver a(make_samples_form({{0, 0}, {0.5, 0.3}, {1, -0.2}}), 1.0);
  const Driver b(make_samples_form({{0, 0}, {0.25, 0.15}, {0.5, 0.3}, {0.75, 0.05}, {1, -0.2}}), 1.0);
  for (double t : {0.1, 0.3, 0.5, 0.66, 0.9, 1.0}) {
    CHECK(std::abs(a.value(t) - b.value(t)) <= 1e-15);
    CHECK(std::abs(a.variation(t) - b.variation(t)) <= 1e-12);
  }
}

TEST_CASE("reversed increments") {
  SECTION("zero driver") {
    const auto b = reversed_increment(make_example("zero"), 0.7);
    CHECK(b.value(0.3) == 0.0);
    CHECK(b.variation(0.7) == 0.0);
  }
  SECTION("sqrt driver at t = 1") {
    const auto b = reversed_increment(make_example("sqrt"), 1.0);
    for (double s : {0.0, 0.2, 0.5, 0.99, 1.0}) {
      CHECK(b.value(s) == Approx(1.0 - std::sqrt(1.0 - s)).margin(1e-15));
      CHECK(std::abs(b.value(s)) <= b.variation(s) + 1e-15);
    }
  }
  SECTION("sampled driver at knot offsets") {
    const Driver d(make_samples_form({{0, 0}, {0.25, 0.5}, {0.5, -0.1}, {1, 0.4}}), 1.0);
    const auto b = reversed_increment(d, 1.0);
    CHECK(b.value(0.5) == Approx(0.4 - (-0.1)).margin(1e-15));
    CHECK(b.value(0.75) == Approx(0.4 - 0.5).margin(1e-15));
    CHECK(b.variation(0.75) == Approx(0.5 + 0.6).margin(1e-15));
  }
  CHECK_THROWS_AS(reversed_increment(make_example("zero"), 0.0), DomainError);
  CHECK_THROWS_AS(reversed_increment(make_example("zero"), 1.5), DomainError);
}

TEST_CASE("gallery constructors") {
  const Driver z = make_example("sqrt", {{"c", 0.0}});
  for (double t : {0.0, 0.3, 1.0}) CHECK(z.value(t) == 0.0);
  CHECK(z.variation(1.0) == 0.0);

  CHECK_THROWS_AS(make_example("power", {{"alpha", 0.4}}), DomainError);
  CHECK_THROWS_AS(make_example("monotone_bvlr", {{"c", 1.5}}), DomainError);
  CHECK_THROWS_AS(make_example("monotone_bvlr", {{"alpha", 0.5}}), DomainError);
  CHECK_THROWS_AS(make_example("nope"), DomainError);
}

TEST_CASE("monotone_bvlr construction identities and infinite 1/2-Hoelder norm") {
  const double eps = 0.1;
  const Driver d = make_example("monotone_bvlr");
  const auto lv = monotone_bvlr_levels(0.5, 0.75, eps, 1.0);
  REQUIRE(lv.s.size() > 8);
  double prev_ratio = 0.0;
  for (std::size_t n = 0; n < lv.s.size(); ++n) {
    const double len = lv.t[n] - lv.s[n];
    // U is close to 1 here, so the difference carries an absolute round-off of a few ulps.
    CHECK(d.value(lv.t[n]) - d.value(lv.s[n]) == Approx(std::pow(len, 0.5 - eps)).epsilon(1e-12).margin(1e-15));
    CHECK(d.value(lv.s[n]) == Approx(lv.x[n]).margin(1e-15));
    const double ratio = (d.value(lv.t[n]) - d.value(lv.s[n])) / std::sqrt(len);
    CHECK(ratio == Approx(std::pow(len, -eps)).epsilon(1e-12).margin(1e-15 / std::sqrt(len)));
    CHECK(ratio > prev_ratio);
    prev_ratio = ratio;
  }
  // Monotone, so the variation is the increment.
  CHECK(d.variation(1.0) == Approx(d.value(1.0)).epsilon(1e-14));
}

TEST_CASE("driver files") {
  const Driver d = parse_driver(R"({"kind": "samples", "knots": [[0, 0], [0.5, 0.25], [1, 0]]})");
  CHECK(d.horizon() == 1.0);
  CHECK(d.value(0.25) == Approx(0.125));
  CHECK(d.variation(1.0) == Approx(0.5));

  const Driver g = parse_driver(R"({"horizon": 2, "kind": "analytic", "family": "sqrt", "params": {"c": 2}})");
  CHECK(g.horizon() == 2.0);
  CHECK(g.value(1.0) == Approx(2.0));

  const Driver back = parse_driver(driver_to_json(g).dump());
  CHECK(back.value(1.7) == g.value(1.7));

  const std::string bad = "{\n  \"kind\": \"samples\",\n  \"knots\": [[0.1, 0], [1, 1]]\n}";
  try {
    parse_driver(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.offset() > 0);
  }
  CHECK_THROWS_AS(parse_driver(R"({"kind": "samples", "knots": [[0, 0], [0.5, 1], [0.5, 2]]})"), ParseError);
  CHECK_THROWS_AS(parse_driver("{not json"), ParseError);
}
