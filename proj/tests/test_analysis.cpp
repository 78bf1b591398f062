#include <doctest.h>

#include "busq/analysis.hpp"
#include "busq/ctmc.hpp"
#include "busq/priority_chain.hpp"

using namespace busq;

namespace {
AnpecCurve curve_of(std::vector<std::pair<int, double>> pts) {
  AnpecCurve c;
  c.points = std::move(pts);
  return c;
}
} // namespace

TEST_CASE("anpec is N minus ANBC") {
  CHECK(anpec(4, 0.07344077) == doctest::Approx(3.92655923).epsilon(1e-12));
  CHECK(anpec(7, 4.58205090) == doctest::Approx(2.41794910).epsilon(1e-12));
  CHECK(anpec(5, 0.0) == 5.0);
  CHECK_THROWS_AS(anpec(4, -0.1), AnalysisError);
  CHECK_THROWS_AS(anpec(4, 4.5), AnalysisError);
}

TEST_CASE("anpec round-trips back to anbc") {
  const double anbc = 1.2345678901234;
  CHECK(6 - anpec(6, anbc) == doctest::Approx(anbc).epsilon(1e-12));
}

TEST_CASE("pct difference matches the published columns") {
  // inputs are the published 8-decimal roundings, so agreement is limited
  // to ~1e-7 absolute
  CHECK(pct_difference(0.07014828, 0.07344077) ==
        doctest::Approx(4.69361131).epsilon(1e-6));
  CHECK(pct_difference(0.62839527, 0.69329368) ==
        doctest::Approx(10.32764113).epsilon(1e-6));
  CHECK(pct_difference(0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(pct_difference(0.0, 0.1), AnalysisError);
}

TEST_CASE("saturation point") {
  SUBCASE("strictly linear curve never saturates") {
    auto c = curve_of({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
    CHECK(saturation_point(c, 0.05) == std::nullopt);
  }
  SUBCASE("constant curve saturates at the second point") {
    auto c = curve_of({{1, 2.0}, {2, 2.0}, {3, 2.0}});
    CHECK(saturation_point(c, 0.05) == 2);
  }
  SUBCASE("too few points rejected") {
    auto c = curve_of({{1, 1.0}});
    CHECK_THROWS_AS(saturation_point(c, 0.05), AnalysisError);
  }
}

TEST_CASE("heavier workload saturates at smaller N") {
  auto anpec_curve = [](double lambda) {
    AnpecCurve c;
    c.lambda = lambda;
    for (int n = 1; n <= 12; ++n) {
      ModelParams m;
      m.n_processors = n;
      m.think_rate = lambda;
      m.resume_prob = 0.8;
      m.blocking_service = Exponential{0.1};
      m.writeback_service = Exponential{0.01};
      const auto chain = build_priority_chain(m);
      const auto g = Generator::assemble(chain.states.size(), chain.transitions);
      const double anbc = priority_anbc(stationary_direct(g).pi, chain.states);
      c.points.emplace_back(n, anpec(n, anbc));
    }
    return c;
  };
  const auto heavy = saturation_point(anpec_curve(0.01), 0.05);
  const auto light = saturation_point(anpec_curve(0.001), 0.05);
  REQUIRE(heavy.has_value());
  if (light.has_value()) CHECK(*heavy < *light);
}

TEST_CASE("conservation report") {
  ModelParams m;
  m.n_processors = 4;
  m.think_rate = 0.01;
  m.resume_prob = 0.8;
  m.blocking_service = Exponential{0.1};
  m.writeback_service = Exponential{0.01};

  SimConfig cf{m, Discipline::Fcfs, 2e5, 1e4, 5, 11, 0.99};
  SimConfig cp = cf;
  cp.discipline = Discipline::Priority;
  const auto fa = run_simulation(cf);
  const auto pa = run_simulation(cp);

  const auto rep = conservation_report(m, fa, m, pa);
  CHECK(rep.priority.wait_writeback.mean == 0.0);
  CHECK(rep.fcfs.wait_overall.mean > 0.0);
  CHECK(rep.overall_wait_difference ==
        doctest::Approx(pa.wait_overall.mean - fa.wait_overall.mean));

  ModelParams other = m;
  other.n_processors = 5;
  CHECK_THROWS_AS(conservation_report(m, fa, other, pa), AnalysisError);
}

TEST_CASE("p=1 makes the disciplines statistically indistinguishable") {
  ModelParams m;
  m.n_processors = 3;
  m.think_rate = 0.005;
  m.resume_prob = 1.0;
  m.blocking_service = Exponential{0.1};
  m.writeback_service = Exponential{0.01};
  SimConfig cf{m, Discipline::Fcfs, 2e5, 1e4, 4, 5, 0.99};
  SimConfig cp = cf;
  cp.discipline = Discipline::Priority;
  const auto fa = run_simulation(cf);
  const auto pa = run_simulation(cp);
  // identical models and identical streams: bitwise equal estimates
  CHECK(fa.anbc.mean == pa.anbc.mean);
  CHECK(fa.wait_overall.mean == pa.wait_overall.mean);
}
