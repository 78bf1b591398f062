#include <doctest.h>

#include <cmath>

#include "busq/ctmc.hpp"
#include "busq/priority_chain.hpp"
#include "test_util.hpp"

using namespace busq;

namespace {

Generator flip_flop(double a, double b) {
  return Generator::assemble(2, {{0, 1, a}, {1, 0, b}});
}

ModelParams n1_params() {
  ModelParams m;
  m.n_processors = 1;
  m.think_rate = 0.001;
  m.resume_prob = 0.8;
  m.blocking_service = Exponential{0.1};
  m.writeback_service = Exponential{0.01};
  return m;
}

// Hand-solved balance equations of the N=1 priority chain, unnormalized over
// (Idle, SB{1}, SW{0}, SW{1}).
constexpr double kHandN1[4] = {1.0, 0.01018519, 0.01851852, 0.00185185};

} // namespace

TEST_CASE("assemble: flip-flop layout") {
  const Generator g = flip_flop(1.0, 2.0);
  CHECK(g.size() == 2);
  CHECK(g.exit_rate(0) == doctest::Approx(1.0));
  CHECK(g.exit_rate(1) == doctest::Approx(2.0));
  REQUIRE(g.row(0).size() == 1);
  CHECK(g.row(0)[0].first == 1);
  CHECK(g.row(0)[0].second == doctest::Approx(1.0));
}

TEST_CASE("assemble: parallel transitions sum") {
  const Generator g = Generator::assemble(2, {{0, 1, 0.3}, {0, 1, 0.2}, {1, 0, 1.0}});
  REQUIRE(g.row(0).size() == 1);
  CHECK(g.row(0)[0].second == doctest::Approx(0.5));
}

TEST_CASE("assemble: input validation") {
  CHECK_THROWS_AS(Generator::assemble(2, {{0, 0, 1.0}}), CtmcError);
  CHECK_THROWS_AS(Generator::assemble(2, {{0, 2, 1.0}}), CtmcError);
  CHECK_THROWS_AS(Generator::assemble(2, {{0, 1, 0.0}}), CtmcError);
  CHECK_THROWS_AS(Generator::assemble(2, {{0, 1, -1.0}}), CtmcError);
}

TEST_CASE("stationary_direct: flip-flop detailed balance") {
  const auto sol = stationary_direct(flip_flop(1.0, 2.0));
  CHECK(sol.pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(sol.pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(sol.residual <= 1e-12);
}

TEST_CASE("stationary_direct: singleton chain") {
  const auto sol = stationary_direct(Generator::assemble(1, {}));
  REQUIRE(sol.pi.size() == 1);
  CHECK(sol.pi[0] == doctest::Approx(1.0));
}

TEST_CASE("stationary_direct: size cap and reducibility") {
  SolveOptions opts;
  opts.direct_cap = 1;
  CHECK_THROWS_AS(stationary_direct(flip_flop(1, 2), opts), CtmcError);
  // 0 -> 1 only: state 0 is transient, GTH hits a zero pivot
  const Generator reducible = Generator::assemble(3, {{0, 1, 1.0}, {1, 0, 1.0}});
  CHECK_THROWS_AS(stationary_direct(reducible), CtmcError);
}

TEST_CASE("stationary_direct: N=1 priority chain matches hand solution") {
  const auto chain = build_priority_chain(n1_params());
  REQUIRE(chain.states.size() == 4);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const auto sol = stationary_direct(g);

  double total = 0;
  for (double v : kHandN1) total += v;
  const int i_idle = chain.states.index_of({PriorityState::Kind::Idle, 0});
  const int i_sb1 = chain.states.index_of({PriorityState::Kind::ServingBlocking, 1});
  const int i_sw0 = chain.states.index_of({PriorityState::Kind::ServingWriteback, 0});
  const int i_sw1 = chain.states.index_of({PriorityState::Kind::ServingWriteback, 1});
  CHECK(sol.pi[i_idle] == doctest::Approx(kHandN1[0] / total).epsilon(1e-6));
  CHECK(sol.pi[i_sb1] == doctest::Approx(kHandN1[1] / total).epsilon(1e-6));
  CHECK(sol.pi[i_sw0] == doctest::Approx(kHandN1[2] / total).epsilon(1e-6));
  CHECK(sol.pi[i_sw1] == doctest::Approx(kHandN1[3] / total).epsilon(1e-6));

  // independent dense linear solve
  const auto oracle = busq::testing::dense_stationary(g);
  for (size_t i = 0; i < oracle.size(); ++i)
    CHECK(sol.pi[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
}

TEST_CASE("stationary_iterative: flip-flop") {
  const auto sol = stationary_iterative(flip_flop(1.0, 2.0));
  CHECK(sol.pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(sol.residual <= 1e-12);
  CHECK(sol.iterations > 0);
}

TEST_CASE("direct and iterative agree on the N=4 priority chain") {
  ModelParams m = n1_params();
  m.n_processors = 4;
  const auto chain = build_priority_chain(m);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const auto d = stationary_direct(g);
  const auto it = stationary_iterative(g);
  for (int i = 0; i < g.size(); ++i)
    CHECK(std::abs(d.pi[i] - it.pi[i]) <= 1e-10);
}

TEST_CASE("transient: t=0 returns the initial distribution") {
  const Generator g = flip_flop(1, 1);
  const std::vector<double> pi0 = {1.0, 0.0};
  CHECK(transient(g, pi0, 0.0) == pi0);
}

TEST_CASE("transient: symmetric flip-flop relaxes to (1/2, 1/2)") {
  const Generator g = flip_flop(1, 1);
  const auto pi = transient(g, {1.0, 0.0}, 50.0);
  CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("transient: negative time rejected") {
  CHECK_THROWS_AS(transient(flip_flop(1, 1), {1.0, 0.0}, -1.0), CtmcError);
}

TEST_CASE("transient stays a probability vector and converges monotonically") {
  ModelParams m = n1_params();
  m.n_processors = 4;
  const auto chain = build_priority_chain(m);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const auto stat = stationary_direct(g);

  std::vector<double> pi0(g.size(), 0.0);
  pi0[chain.states.index_of({PriorityState::Kind::Idle, 0})] = 1.0;

  double prev_dist = 2.0;
  for (double t : {10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0, 1280.0}) {
    const auto pi = transient(g, pi0, t);
    double sum = 0, dist = 0;
    for (int i = 0; i < g.size(); ++i) {
      CHECK(pi[i] >= -1e-12);
      sum += pi[i];
      dist = std::max(dist, std::abs(pi[i] - stat.pi[i]));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(dist <= prev_dist + 1e-12);
    prev_dist = dist;
  }
}

TEST_CASE("transient reaches equilibrium at t=1e6 on the N=4 priority chain") {
  ModelParams m = n1_params();
  m.n_processors = 4;
  const auto chain = build_priority_chain(m);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const auto stat = stationary_direct(g);
  std::vector<double> pi0(g.size(), 0.0);
  pi0[chain.states.index_of({PriorityState::Kind::Idle, 0})] = 1.0;
  const auto pi = transient(g, pi0, 1e6);
  for (int i = 0; i < g.size(); ++i)
    CHECK(std::abs(pi[i] - stat.pi[i]) <= 1e-8);
}

TEST_CASE("expect: constants and blocked count") {
  const auto chain = build_priority_chain(n1_params());
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const auto sol = stationary_direct(g);
  CHECK(expect(sol.pi, [](int) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expect(sol.pi, [](int) { return 0.0; }) == doctest::Approx(0.0));
  const double blocked = expect(sol.pi, [&](int i) {
    const auto& s = chain.states.state(i);
    return s.kind == PriorityState::Kind::Idle ? 0.0 : double(s.count);
  });
  // (0.01018519 + 0.00185185) / 1.03055556 from the hand solution
  CHECK(blocked == doctest::Approx(0.01168014).epsilon(1e-6));
}

TEST_CASE("row sums of assembled generators vanish") {
  ModelParams m = n1_params();
  for (int n : {1, 3, 6}) {
    m.n_processors = n;
    const auto chain = build_priority_chain(m);
    const auto g = Generator::assemble(chain.states.size(), chain.transitions);
    for (int i = 0; i < g.size(); ++i) {
      double row_sum = -g.exit_rate(i);
      for (const auto& [j, r] : g.row(i)) row_sum += r;
      CHECK(std::abs(row_sum) <= 1e-12);
    }
  }
}
