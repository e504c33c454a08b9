#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "loewner/continuity.hpp"
#include "loewner/errors.hpp"
#include "loewner/gallery.hpp"

using namespace loewner;
using Catch::Approx;

TEST_CASE("perturbation names") {
  for (auto p : {Perturbation::bump, Perturbation::jitter, Perturbation::mollify})
    CHECK(perturbation_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(perturbation_from_string("wobble"), DomainError);
  CHECK(default_mode(Perturbation::bump) == SweepMode::tv);
  CHECK(default_mode(Perturbation::mollify) == SweepMode::uniform);
}

TEST_CASE("perturbations have the requested size") {
  const Driver base = make_example("sqrt");
  CHECK(tv_distance(base, base) == 0.0);
  CHECK(sup_distance(base, base) == 0.0);
  for (auto kind : {Perturbation::bump, Perturbation::jitter}) {
    PerturbationExperiment exp{base, kind};
    for (double m : {1e-1, 1e-3}) {
      INFO(to_string(kind) << " " << m);
      const Driver v = perturbed_driver(exp, m);
      CHECK(tv_distance(base, v) == Approx(m).epsilon(1e-9));
      CHECK(sup_distance(base, v) <= m * (1 + 1e-12));
      CHECK(v.value(0.0) == base.value(0.0));
    }
  }
  PerturbationExperiment moll{base, Perturbation::mollify};
  double prev = 1.0;
  for (double m : {1e-1, 1e-2, 1e-3}) {
    const double dist = sup_distance(base, perturbed_driver(moll, m));
    CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("jitter is reproducible from its seed") {
  PerturbationExperiment a{make_example("random"), Perturbation::jitter};
  PerturbationExperiment b = a;
  const Driver u = perturbed_driver(a, 1e-2), v = perturbed_driver(b, 1e-2);
  CHECK(tv_distance(u, v) == 0.0);
  b.seed = 2;
  CHECK(tv_distance(u, perturbed_driver(b, 1e-2)) > 0.0);
}

TEST_CASE("traces move continuously in the perturbation size") {
  SweepConfig cfg;
  cfg.grid_points = 64;
  for (auto [name, kind] : {std::pair{"sqrt", Perturbation::bump}, std::pair{"random", Perturbation::jitter},
                            std::pair{"random", Perturbation::mollify}}) {
    INFO(name << " " << to_string(kind));
    PerturbationExperiment exp{make_example(name), kind};
    exp.magnitudes = {1e-1, 1e-2, 1e-3};
    const auto r = run_perturbation_sweep(exp, cfg);
    REQUIRE(r.rungs.size() == 3);
    CHECK(r.decreasing);
    for (const auto& rung : r.rungs) CHECK_FALSE(rung.skipped);
    CHECK(r.final_trace_dist < r.rungs.front().trace_dist);
    CHECK(r.final_below_tolerance);
  }
  // The sqrt-type singularity of logsqrt at 0 slows the uniform convergence, but it still converges.
  PerturbationExperiment exp{make_example("logsqrt"), Perturbation::mollify};
  exp.magnitudes = {1e-1, 1e-2, 1e-3};
  const auto r = run_perturbation_sweep(exp, cfg);
  CHECK(r.decreasing);
  CHECK(r.final_trace_dist < 0.1 * r.rungs.front().trace_dist);
}

TEST_CASE("serial and parallel sweeps agree") {
  PerturbationExperiment exp{make_example("power"), Perturbation::bump};
  exp.magnitudes = {1e-1, 1e-2};
  SweepConfig cfg;
  cfg.grid_points = 32;
  const auto a = run_perturbation_sweep(exp, cfg, Exec::serial);
  const auto b = run_perturbation_sweep(exp, cfg, Exec::parallel);
  CHECK(sweep_csv(a) == sweep_csv(b));
  std::istringstream in(sweep_csv(a));
  std::string header;
  std::getline(in, header);
  CHECK(header == "magnitude,tv_dist,sup_dist,trace_dist");
}

TEST_CASE("equicontinuity of variation profiles") {
  const std::vector<double> h{0.1, 0.01, 0.001};
  SECTION("a mollified family shares one modulus") {
    PerturbationExperiment exp{make_example("logsqrt"), Perturbation::mollify};
    std::vector<Driver> family;
    for (double m : {1e-1, 1e-2, 1e-3}) family.push_back(perturbed_driver(exp, m));
    const auto r = equicontinuity_profile(family, h);
    CHECK(r.bounded);
    CHECK(r.exploding.empty());
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(r.modulus[k] < r.modulus[k - 1]);
    for (std::size_t k = 0; k < h.size(); ++k)
      for (const auto& m : r.member) CHECK(m[k] <= r.modulus[k]);
  }
  SECTION("a member with exploding variation is flagged") {
    std::vector<Driver> family{make_example("sqrt"), make_example("power"), make_example("logsqrt"),
                               make_example("random", {{"knots", 256}, {"amplitude", 50.0}})};
    const auto r = equicontinuity_profile(family, h);
    CHECK_FALSE(r.bounded);
    REQUIRE(r.exploding.size() == 1);
    CHECK(r.exploding.front() == 3);
  }
  SECTION("a single driver is its own modulus") {
    const std::vector<Driver> one{make_example("sqrt")};
    const auto r = equicontinuity_profile(one, h);
    CHECK(r.bounded);
    // V(s + h) - V(s) is largest at s = 0 for sqrt: sqrt(h).
    for (std::size_t k = 0; k < h.size(); ++k) {
      CHECK(r.modulus[k] == r.member[0][k]);
      CHECK(r.modulus[k] == Approx(std::sqrt(h[k])).epsilon(1e-12));
    }
  }
}

TEST_CASE("bump sweeps decay on every gallery driver") {
  // Coarse trend: final distance <= 10 x first distance x (last / first magnitude).
  SweepConfig cfg;
  cfg.grid_points = 64;
  for (const Driver& d : bvlr_gallery()) {
    INFO(d.family());
    PerturbationExperiment exp{d, Perturbation::bump};
    exp.magnitudes = {1e-1, 1e-2, 1e-3};
    const auto r = run_perturbation_sweep(exp, cfg);
    CHECK(r.decreasing);
    CHECK(r.final_trace_dist <= 10.0 * r.rungs.front().trace_dist * 1e-2);
  }
}
