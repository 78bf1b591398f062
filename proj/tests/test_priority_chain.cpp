#include <doctest.h>

#include <cmath>

#include "busq/priority_chain.hpp"
#include "test_util.hpp"

using namespace busq;

namespace {

ModelParams params(int n, double lambda, double mu2 = 0.01, double p = 0.8,
                   double mu1 = 0.1) {
  ModelParams m;
  m.n_processors = n;
  m.think_rate = lambda;
  m.resume_prob = p;
  m.blocking_service = Exponential{mu1};
  m.writeback_service = Exponential{mu2};
  return m;
}

double solve_anbc(const ModelParams& m,
                  WritebackOwner owner = WritebackOwner::Resumes) {
  const auto chain = build_priority_chain(m, owner);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  return priority_anbc(stationary_direct(g).pi, chain.states, owner);
}

} // namespace

TEST_CASE("state count is 2N+2") {
  for (int n = 1; n <= 12; ++n) {
    const auto chain = build_priority_chain(params(n, 0.001));
    CHECK(chain.states.size() == 2 * n + 2);
  }
}

TEST_CASE("N=1 chain has the six expected transitions") {
  const auto chain = build_priority_chain(params(1, 0.001));
  REQUIRE(chain.states.size() == 4);
  CHECK(chain.transitions.size() == 6);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const int i_sw1 = chain.states.index_of({PriorityState::Kind::ServingWriteback, 1});
  REQUIRE(g.row(i_sw1).size() == 1); // only mu2 leaves SW{N}
  CHECK(g.row(i_sw1)[0].second == doctest::Approx(0.01));
}

TEST_CASE("exactly one transition out of ServingWriteback{N}") {
  for (int n : {2, 5, 9}) {
    const auto chain = build_priority_chain(params(n, 0.003));
    const auto g = Generator::assemble(chain.states.size(), chain.transitions);
    const int i = chain.states.index_of({PriorityState::Kind::ServingWriteback, n});
    CHECK(g.row(i).size() == 1);
    CHECK(g.row(i)[0].second == doctest::Approx(0.01));
  }
}

TEST_CASE("non-exponential services rejected") {
  ModelParams m = params(4, 0.001);
  m.blocking_service = Deterministic{10};
  CHECK_THROWS_AS(build_priority_chain(m), NonExponentialService);
}

TEST_CASE("published anchors: table 1.a") {
  CHECK(solve_anbc(params(4, 0.001)) == doctest::Approx(0.07344077).epsilon(1e-7));
  CHECK(solve_anbc(params(4, 0.010)) == doctest::Approx(1.57171551).epsilon(1e-7));
}

TEST_CASE("N=1 ANBC from the hand-solved chain") {
  CHECK(solve_anbc(params(1, 0.001)) == doctest::Approx(0.01168014).epsilon(1e-6));
}

TEST_CASE("flow balance residuals vanish at the table 1.a point") {
  const auto m = params(4, 0.001);
  const auto chain = build_priority_chain(m);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const auto sol = stationary_direct(g);
  const auto [r1, r2] = priority_flow_balance(sol.pi, chain.states, m);
  CHECK(r1 <= 1e-10);
  CHECK(r2 <= 1e-10);

  // lambda (N - ANBC) is the think-completion flow; check the magnitude too
  const double anbc = priority_anbc(sol.pi, chain.states);
  CHECK(0.001 * (4 - anbc) == doctest::Approx(0.0039266).epsilon(1e-4));
}

TEST_CASE("writeback/blocking busy-time ratio equals q mu1 / mu2") {
  const auto m = params(4, 0.001);
  const auto chain = build_priority_chain(m);
  const auto g = Generator::assemble(chain.states.size(), chain.transitions);
  const auto sol = stationary_direct(g);
  double p_sb = 0, p_sw = 0;
  for (int i = 0; i < chain.states.size(); ++i) {
    const auto& s = chain.states.state(i);
    if (s.kind == PriorityState::Kind::ServingBlocking) p_sb += sol.pi[i];
    if (s.kind == PriorityState::Kind::ServingWriteback) p_sw += sol.pi[i];
  }
  CHECK(p_sw / p_sb == doctest::Approx(2.0).epsilon(1e-10)); // q mu1 / mu2 = 2
}

TEST_CASE("ANBC is strictly increasing in lambda") {
  for (double mu2 : {0.01, 1.0 / 150.0}) {
    for (int n : {4, 5, 6, 7}) {
      double prev = -1;
      for (int i = 1; i <= 10; ++i) {
        const double a = solve_anbc(params(n, i * 0.001, mu2));
        CHECK(a > prev);
        prev = a;
      }
    }
  }
}

TEST_CASE("p=1 degenerates to the machine-repairman model") {
  for (int n = 1; n <= 8; ++n) {
    const auto m = params(n, 0.004, 0.01, 1.0);
    const auto chain = build_priority_chain(m);
    CHECK(chain.states.size() == n + 1); // no writeback states when q=0
    const auto g = Generator::assemble(chain.states.size(), chain.transitions);
    const auto sol = stationary_direct(g);
    const auto oracle = busq::testing::machine_repairman(n, 0.004, 0.1);
    for (int k = 0; k <= n; ++k) {
      const int idx = k == 0
                          ? chain.states.index_of({PriorityState::Kind::Idle, 0})
                          : chain.states.index_of(
                                {PriorityState::Kind::ServingBlocking, k});
      CHECK(std::abs(sol.pi[idx] - oracle[static_cast<size_t>(k)]) <= 1e-10);
    }
  }
}

TEST_CASE("owner-held variant: 2N+1 states, does not match the tables") {
  const auto chain = build_priority_chain(params(4, 0.001), WritebackOwner::Held);
  CHECK(chain.states.size() == 2 * 4 + 1);
  const double a = solve_anbc(params(4, 0.001), WritebackOwner::Held);
  CHECK(std::abs(a - 0.07344077) > 1e-4); // rejected reading of the model
}
