#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "loewner/errors.hpp"
#include "loewner/gallery.hpp"
#include "loewner/reverse_solver.hpp"

using namespace loewner;
using Catch::Approx;

namespace {

double sup_diff_at(const PhiPath& p, const PhiPath& q, std::span<const double> stops) {
  double m = 0.0;
  for (double s : stops) m = std::max(m, std::abs(p.phi_at(s) - q.phi_at(s)));
  return m;
}

}  // namespace

TEST_CASE("zero driver is solved exactly") {
  const auto b = reversed_increment(make_example("zero"), 1.0);
  const auto p = solve_phi(b, cplx(-1.0, 0.0));
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(std::abs(p.phi[k] - cplx(-1.0 - 4.0 * p.s[k], 0.0)) <= 1e-14);
    CHECK(std::abs(p.a[k] - cplx(0.0, std::sqrt(1.0 + 4.0 * p.s[k]))) <= 1e-14);
  }
  const auto z = solve_phi_zero(b);
  CHECK(z.ladder.converged);
  CHECK(std::abs(z.end_sqrt() - cplx(0.0, 2.0)) <= 1e-9);
  CHECK(z.s.back() == 1.0);
}

TEST_CASE("sqrt driver obeys Brownian scaling") {
  // beta^t(s) = c (sqrt t - sqrt(t - s)) gives phi^t_s = t phi^1_{s / t}.
  const Driver d = make_example("sqrt", {{"c", 1.5}});
  const std::vector<double> stops1{0.1, 0.4, 0.7};
  const std::vector<double> stops_t{0.025, 0.1, 0.175};
  const auto one = solve_phi_zero(reversed_increment(d, 1.0), {}, stops1);
  const auto quarter = solve_phi_zero(reversed_increment(d, 0.25), {}, stops_t);
  for (std::size_t k = 0; k < stops1.size(); ++k)
    CHECK(std::abs(quarter.phi_at(stops_t[k]) - 0.25 * one.phi_at(stops1[k])) <= 1e-8);
  CHECK(std::abs(quarter.end_phi() - 0.25 * one.end_phi()) <= 1e-8);
}

TEST_CASE("solution stays in the closed upper half-plane with Y^2 <= 4 s") {
  for (const Driver& d : bvlr_gallery()) {
    INFO(d.family());
    const auto b = reversed_increment(d, d.horizon());
    const auto p = solve_phi_zero(b);
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(p.a[k].imag() >= 0.0);
      CHECK(p.a[k].imag() * p.a[k].imag() <= 4.0 * p.s[k] * (1 + 1e-9) + 1e-12);
      CHECK(std::abs(p.a[k] * p.a[k] - p.phi[k]) <= 1e-12 * (1.0 + std::abs(p.phi[k])));
    }
    CHECK(integral_equation_residual(p) <= 1e-7);
  }
}

TEST_CASE("hybrid and plain integration agree") {
  SolverConfig hybrid, plain;
  hybrid.rtol = plain.rtol = 1e-12;
  plain.hybrid = false;
  const std::vector<double> stops{0.25, 0.5, 0.75};
  for (const char* name : {"logsqrt", "random", "power"}) {
    INFO(name);
    const auto b = reversed_increment(make_example(name), 1.0);
    const auto h = solve_phi(b, cplx(-0.01, 0.0), hybrid, stops);
    const auto p = solve_phi(b, cplx(-0.01, 0.0), plain, stops);
    CHECK(sup_diff_at(h, p, stops) <= 1e-8);
    CHECK(std::abs(h.end_phi() - p.end_phi()) <= 1e-8);
  }
}

TEST_CASE("two regularization ladders reach the same limit") {
  SolverConfig other;
  other.ladder = {0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7, 3e-8, 1e-8};
  for (const char* name : {"sqrt", "logsqrt", "monotone_bvlr"}) {
    INFO(name);
    const auto b = reversed_increment(make_example(name), 1.0);
    const auto p = solve_phi_zero(b);
    const auto q = solve_phi_zero(b, other);
    CHECK(p.ladder.converged);
    CHECK(std::abs(p.end_phi() - q.end_phi()) <= 1e-6);
  }
}

TEST_CASE("ladder differences shrink and a short ladder fails loudly") {
  const auto b = reversed_increment(make_example("logsqrt"), 1.0);
  const auto p = solve_phi_zero(b);
  REQUIRE(p.ladder.diffs.size() >= 3);
  CHECK(p.ladder.diffs.back() < p.ladder.diffs.front());
  SolverConfig short_ladder;
  short_ladder.max_rungs = 2;
  CHECK_THROWS_AS(solve_phi_zero(b, short_ladder), NonConvergence);
}

TEST_CASE("adaptive solutions converge under tolerance refinement") {
  const auto b = reversed_increment(make_example("random"), 1.0);
  SolverConfig loose, tight;
  loose.rtol = 1e-7;
  tight.rtol = 1e-12;
  const auto p = solve_phi(b, cplx(0.0, 0.5), loose);
  const auto q = solve_phi(b, cplx(0.0, 0.5), tight);
  CHECK(std::abs(p.end_phi() - q.end_phi()) <= 1e-5);
  CHECK(q.size() > p.size());
  SolverConfig fixed;
  fixed.adaptive = false;
  fixed.base_step = 1e-3;
  CHECK(std::abs(solve_phi(b, cplx(0.0, 0.5), fixed).end_phi() - q.end_phi()) <= 1e-5);
}

TEST_CASE("stops are exact mesh nodes") {
  const auto b = reversed_increment(make_example("power"), 1.0);
  const std::vector<double> stops{0.1, 1.0 / 3.0, 0.9};
  const auto p = solve_phi_zero(b, {}, stops);
  for (double s : stops) CHECK(p.s[p.node_index(s)] == s);
  CHECK_THROWS(p.phi_at(0.123456));
  for (std::size_t k = 1; k < p.size(); ++k) CHECK(p.s[k] > p.s[k - 1]);
}

TEST_CASE("X Y identity along paths") {
  const auto b = reversed_increment(make_example("logsqrt"), 1.0);
  const auto p = solve_phi_zero(b);
  const auto r = xy_identity_check(p, b);
  CHECK(r.max_normalized <= 1e-6);
  CHECK(r.max_re_excess <= 1e-9);
}

TEST_CASE("path CSV") {
  const auto b = reversed_increment(make_example("zero"), 1.0);
  const auto p = solve_phi(b, cplx(-1.0, 0.0));
  std::istringstream in(phi_path_csv(p));
  std::string line;
  std::getline(in, line);
  CHECK(line == "s,re_phi,im_phi,re_sqrt,im_sqrt,local_err");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == p.size());
}
