#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "loewner/forward.hpp"
#include "loewner/gallery.hpp"
#include "loewner/trace.hpp"

using namespace loewner;
using Catch::Approx;

namespace {

// Forward map of the vertical slit, branch in the upper half-plane.
cplx slit_map(cplx z, double t) {
  cplx w = std::sqrt(z * z + 4.0 * t);
  return w.imag() < 0 ? -w : w;
}

}  // namespace

TEST_CASE("zero driver flows along sqrt(z^2 + 4t)") {
  const Driver d = make_example("zero");
  for (cplx z : {cplx(1, 2), cplx(-0.3, 0.1), cplx(5, 0.01), cplx(0, 3)}) {
    const auto f = flow_forward(d, z);
    CHECK(f.status == FlowStatus::alive);
    CHECK(std::abs(f.end() - slit_map(z, 1.0)) <= 1e-10 * std::abs(f.end()));
  }
  // Just to the right of the slit tip at i, the map is the boundary value sqrt(3).
  const auto f = flow_forward(d, cplx(1e-12, 1.0));
  CHECK(std::abs(f.end() - std::sqrt(3.0)) <= 1e-9);
}

TEST_CASE("points on the slit are swallowed when the tip passes") {
  const Driver d = make_example("zero", {{"horizon", 2.0}});
  const auto a = flow_forward(d, cplx(0, 1));
  CHECK(a.status == FlowStatus::swallowed);
  CHECK(a.swallow_time == Approx(0.25).epsilon(1e-6));
  const auto b = flow_forward(d, cplx(0, 2));
  CHECK(b.status == FlowStatus::swallowed);
  CHECK(b.swallow_time == Approx(1.0).epsilon(1e-6));
  // Status is monotone in t_end: alive before the swallow time, swallowed after.
  CHECK(flow_forward(d, cplx(0, 2), {}, 0.9).status == FlowStatus::alive);
  const auto c = flow_forward(d, cplx(0, 2), {}, 1.5);
  CHECK(c.status == FlowStatus::swallowed);
  CHECK(c.swallow_time == b.swallow_time);
}

TEST_CASE("imaginary part decreases along every flow") {
  for (const char* name : {"random", "logsqrt", "spiral"}) {
    INFO(name);
    const Driver d = make_example(name);
    for (cplx z : {cplx(0.2, 0.5), cplx(-1, 1), cplx(2, 0.05)}) {
      const auto f = flow_forward(d, z);
      for (std::size_t k = 1; k < f.g.size(); ++k) CHECK(f.g[k].imag() <= f.g[k - 1].imag() * (1 + 1e-12));
    }
  }
}

TEST_CASE("far field behaves like z + 2t / z") {
  // z (g - z) - 2t = O(1 / z) with a nonzero coefficient for c sqrt(t).
  const Driver d = make_example("sqrt");
  const cplx dir = std::polar(1.0, std::numbers::pi / 3);
  std::vector<double> err;
  for (double r : {10.0, 100.0, 1000.0}) {
    const cplx z = r * dir;
    const auto f = flow_forward(d, z);
    err.push_back(std::abs(z * (f.end() - z) - 2.0));
  }
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log10(err[k] / err[k - 1]) == Approx(-1.0).margin(0.05));
}

TEST_CASE("half-plane capacity grows like t") {
  for (const char* name : {"zero", "random", "logsqrt"}) {
    INFO(name);
    const Driver d = make_example(name);
    for (double t : {0.25, 1.0}) {
      const auto r = hcap_estimate(d, t);
      CHECK_FALSE(r.warning);
      CHECK(r.half == Approx(t).epsilon(1e-8));
      CHECK(r.b == 2.0 * r.half);
    }
  }
}

TEST_CASE("reverse trace points map back to the driver") {
  for (const char* name : {"zero", "random"}) {
    INFO(name);
    const Driver d = make_example(name);
    const auto p = trace_incremental(d, uniform_grid(1.0, 65));
    RoundtripOptions opts;
    opts.samples = 6;
    const auto r = roundtrip_residual(d, p, {}, opts);
    CHECK(r.points.size() == 6);
    CHECK(r.max_residual <= 1e-5);
    for (const auto& pt : r.points) {
      CHECK(pt.eta.size() == 4);
      // Raw values approach U_t like sqrt(eta).
      CHECK(std::abs(pt.raw.back()) < std::abs(pt.raw.front()));
    }
  }
}
