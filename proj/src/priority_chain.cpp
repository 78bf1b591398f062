#include "busq/priority_chain.hpp"

namespace busq {

namespace {
PriorityState idle() { return {PriorityState::Kind::Idle, 0}; }
PriorityState sb(int k) { return {PriorityState::Kind::ServingBlocking, k}; }
PriorityState sw(int j) { return {PriorityState::Kind::ServingWriteback, j}; }
} // namespace

PriorityChain build_priority_chain(const ModelParams& raw, WritebackOwner owner) {
  const ModelParams params = validate(raw);
  if (!is_exponential(params.blocking_service) ||
      !is_exponential(params.writeback_service))
    throw NonExponentialService();

  const int n = params.n_processors;
  const double lam = params.think_rate;
  const double mu1 = exponential_rate(params.blocking_service);
  const double mu2 = exponential_rate(params.writeback_service);
  const double p = params.resume_prob;
  const double q = params.writeback_prob();

  PriorityChain c;
  const int i_idle = c.states.add(idle());
  for (int k = 1; k <= n; ++k) c.states.add(sb(k));
  // q = 0 means write-back states are unreachable; leaving them in would make
  // the chain reducible. The space then degenerates to the machine-repairman
  // chain {Idle, SB{1..N}}.
  const int j_lo = owner == WritebackOwner::Resumes ? 0 : 1;
  if (q > 0)
    for (int j = j_lo; j <= n; ++j) c.states.add(sw(j));

  auto add = [&](const PriorityState& a, const PriorityState& b, double r) {
    if (r > 0) c.transitions.push_back({c.states.index_of(a), c.states.index_of(b), r});
  };

  add(idle(), sb(1), n * lam);
  for (int k = 1; k <= n; ++k) {
    if (k < n) add(sb(k), sb(k + 1), (n - k) * lam);
    add(sb(k), k > 1 ? sb(k - 1) : idle(), p * mu1);
    if (owner == WritebackOwner::Resumes)
      add(sb(k), sw(k - 1), q * mu1); // owner resumes thinking
    else
      add(sb(k), sw(k), q * mu1);     // owner held behind its write-back
  }
  if (q > 0) {
    for (int j = j_lo; j <= n; ++j) {
      // n - j processors are thinking in both variants (the owner thinks in
      // Resumes but is then counted in j once it blocks again).
      if (j < n) add(sw(j), sw(j + 1), (n - j) * lam);
      if (owner == WritebackOwner::Resumes)
        add(sw(j), j > 0 ? sb(j) : idle(), mu2);
      else
        add(sw(j), j > 1 ? sb(j - 1) : idle(), mu2);
    }
  }
  (void)i_idle;
  return c;
}

double priority_anbc(const std::vector<double>& pi, const PriorityStateSpace& states,
                     WritebackOwner owner) {
  double a = 0;
  for (int i = 0; i < states.size(); ++i) {
    const auto& s = states.state(i);
    if (s.kind != PriorityState::Kind::Idle) a += pi[static_cast<size_t>(i)] * s.count;
  }
  (void)owner; // both variants count exactly s.count blocked processors
  return a;
}

std::pair<double, double> priority_flow_balance(const std::vector<double>& pi,
                                                const PriorityStateSpace& states,
                                                const ModelParams& params) {
  const double mu1 = exponential_rate(params.blocking_service);
  const double mu2 = exponential_rate(params.writeback_service);
  double p_sb = 0, p_sw = 0, anbc = 0;
  for (int i = 0; i < states.size(); ++i) {
    const auto& s = states.state(i);
    const double w = pi[static_cast<size_t>(i)];
    if (s.kind == PriorityState::Kind::ServingBlocking) {
      p_sb += w;
      anbc += w * s.count;
    } else if (s.kind == PriorityState::Kind::ServingWriteback) {
      p_sw += w;
      anbc += w * s.count;
    }
  }
  const double r1 = std::abs(params.think_rate * (params.n_processors - anbc) -
                             mu1 * p_sb);
  const double r2 =
      std::abs(params.writeback_prob() * mu1 * p_sb - mu2 * p_sw);
  return {r1, r2};
}

} // namespace busq
