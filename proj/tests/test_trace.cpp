#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "loewner/errors.hpp"
#include "loewner/gallery.hpp"
#include "loewner/trace.hpp"

using namespace loewner;
using Catch::Approx;

namespace {

TraceConfig serial() {
  TraceConfig c;
  c.exec = Exec::serial;
  return c;
}

}  // namespace

TEST_CASE("zero driver traces the vertical slit") {
  const auto grid = uniform_grid(1.0, 33);
  for (const auto& p : {trace_per_anchor(make_example("zero"), grid), trace_incremental(make_example("zero"), grid)}) {
    CHECK(p.gamma.front() == cplx(0.0, 0.0));
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(p.gamma[k] - cplx(0.0, 2.0 * std::sqrt(grid[k]))) <= 1e-9);
  }
}

TEST_CASE("c sqrt(t) traces a ray at angle alpha pi") {
  // Self-similar solution: the trace is the ray at angle alpha pi with
  // c = 2 (1 - 2 alpha) / sqrt(alpha (1 - alpha)).
  for (double c : {0.5, 1.0, 3.0}) {
    INFO("c = " << c);
    const auto f = [c](double a) { return 2 * (1 - 2 * a) / std::sqrt(a * (1 - a)) - c; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::bisect(f, 1e-9, 0.5, tol, iters);
    const double alpha = 0.5 * (lo + hi);

    const Driver d = make_example("sqrt", {{"c", c}});
    const auto p = trace_per_anchor(d, uniform_grid(1.0, 17));
    const cplx dir = p.gamma.back() / std::abs(p.gamma.back());
    CHECK(std::arg(dir) == Approx(alpha * std::numbers::pi).epsilon(1e-8));
    // All points lie on the ray and scale like sqrt(t).
    for (std::size_t k = 1; k < p.t.size(); ++k) {
      CHECK(std::abs(p.gamma[k] / std::abs(p.gamma[k]) - dir) <= 1e-4);
      CHECK(std::abs(p.gamma[k]) == Approx(std::abs(p.gamma.back()) * std::sqrt(p.t[k])).epsilon(1e-8));
    }
  }
}

TEST_CASE("per-anchor and incremental traces agree") {
  for (const char* name : {"logsqrt", "random", "monotone_bvlr", "power"}) {
    INFO(name);
    const Driver d = make_example(name);
    const auto grid = uniform_grid(d.horizon(), 129);
    const auto a = trace_per_anchor(d, grid);
    const auto b = trace_incremental(d, grid);
    CHECK(b.method == TraceMethod::incremental);
    CHECK(max_distance(a, b) <= 1e-7);
  }
}

TEST_CASE("traces are stable under grid refinement") {
  const Driver d = make_example("random");
  const auto coarse = trace_incremental(d, uniform_grid(1.0, 65));
  const auto fine = trace_incremental(d, uniform_grid(1.0, 129));
  for (std::size_t k = 0; k < coarse.t.size(); ++k) {
    REQUIRE(fine.t[2 * k] == Approx(coarse.t[k]).margin(1e-15));
    CHECK(std::abs(fine.gamma[2 * k] - coarse.gamma[k]) <= 1e-7);
  }
}

TEST_CASE("trace size is controlled by variation and time") {
  // Re sqrt(theta) is bounded by the variation and Im^2 by 4 t.
  for (const Driver& d : bvlr_gallery()) {
    INFO(d.family());
    const auto p = trace_per_anchor(d, uniform_grid(d.horizon(), 65));
    for (std::size_t k = 0; k < p.t.size(); ++k) {
      const double v = d.variation(p.t[k]);
      CHECK(std::norm(p.gamma[k]) <= (v * v + 4.0 * p.t[k]) * (1 + 1e-8) + 1e-12);
      CHECK(p.gamma[k].imag() >= 0.0);
      CHECK(std::abs(p.gamma[k] * p.gamma[k] - p.theta[k]) <= 1e-12 * (1.0 + std::abs(p.theta[k])));
    }
  }
}

TEST_CASE("simple traces pass the simpleness check") {
  for (const char* name : {"zero", "sqrt", "random", "logsqrt"}) {
    INFO(name);
    const Driver d = make_example(name);
    const auto r = simpleness_check(trace_incremental(d, uniform_grid(d.horizon(), 129)));
    CHECK(r.pass);
    CHECK(r.pairs > 0);
  }
  // A hand-made polyline that doubles back on itself fails.
  TracePath bad;
  bad.t = {0, 1, 2, 3, 4, 5};
  bad.gamma = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {0, 2}, {0, 0.5}};
  bad.theta.resize(6);
  bad.err.resize(6);
  CHECK_FALSE(simpleness_check(bad).pass);
}

TEST_CASE("traces are deterministic across runs and execution modes") {
  const Driver d = make_example("logsqrt");
  const auto grid = uniform_grid(d.horizon(), 65);
  const auto a = trace_incremental(d, grid);
  const auto b = trace_incremental(d, grid);
  const auto c = trace_incremental(d, grid, serial());
  const auto e = trace_per_anchor(d, grid, serial());
  const auto f = trace_per_anchor(d, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(a.gamma[k] == b.gamma[k]);
    CHECK(a.gamma[k] == c.gamma[k]);
    CHECK(e.gamma[k] == f.gamma[k]);
  }
  CHECK(trace_csv(a) == trace_csv(b));
}

TEST_CASE("trace preconditions") {
  const Driver ramp = make_example("ramp");
  const auto grid = uniform_grid(1.0, 33);
  CHECK_THROWS_AS(trace_per_anchor(ramp, grid), ConditionFailure);
  const std::vector<double> no_origin{0.1, 0.5};
  CHECK_THROWS_AS(trace_per_anchor(make_example("zero"), no_origin), DomainError);
  CHECK_THROWS_AS(uniform_grid(1.0, 1), DomainError);
}

TEST_CASE("trace CSV columns") {
  const auto p = trace_per_anchor(make_example("zero"), uniform_grid(1.0, 5));
  std::istringstream plain(trace_csv(p)), timed(trace_csv(p, true));
  std::string line;
  std::getline(plain, line);
  CHECK(line == "t,re_gamma,im_gamma,err_estimate");
  std::getline(timed, line);
  CHECK(line.find("sqrt_t") != std::string::npos);
}
