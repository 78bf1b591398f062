#include "busq/fcfs_chain.hpp"

#include <bit>
#include <deque>

namespace busq {

int QueueState::count_writebacks() const {
  return std::popcount(bits & ((length >= 64 ? ~uint64_t{0} : (uint64_t{1} << length) - 1)));
}

std::vector<std::pair<QueueState, double>> fcfs_transitions(
    const QueueState& s, const ModelParams& params) {
  const int n = params.n_processors;
  const double lam = params.think_rate;
  const double mu1 = exponential_rate(params.blocking_service);
  const double mu2 = exponential_rate(params.writeback_service);
  const double p = params.resume_prob;
  const double q = params.writeback_prob();

  std::vector<std::pair<QueueState, double>> out;
  const int nb = s.count_blocking();
  if (nb < n) out.emplace_back(s.append_blocking(), (n - nb) * lam);
  if (!s.empty()) {
    if (s.head_is_writeback()) {
      out.emplace_back(s.pop_head(), mu2);
    } else {
      if (p > 0) out.emplace_back(s.pop_head(), p * mu1);
      if (q > 0) out.emplace_back(s.pop_head().append_writeback(), q * mu1);
    }
  }
  return out;
}

QueueStateSpace fcfs_reachable(const ModelParams& raw, int cap_n) {
  const ModelParams params = validate(raw);
  if (!is_exponential(params.blocking_service) ||
      !is_exponential(params.writeback_service))
    throw NonExponentialService();
  if (params.n_processors > cap_n)
    throw StateSpaceCapExceeded(
        "FCFS state space for N=" + std::to_string(params.n_processors) +
        " exceeds the cap N<=" + std::to_string(cap_n));

  QueueStateSpace space;
  std::deque<QueueState> frontier;
  space.add(QueueState{});
  frontier.push_back(QueueState{});
  const int n = params.n_processors;
  while (!frontier.empty()) {
    QueueState s = frontier.front();
    frontier.pop_front();
    for (const auto& [t, rate] : fcfs_transitions(s, params)) {
      (void)rate;
      if (t.count_writebacks() > n || t.count_blocking() > n)
        throw std::logic_error("FCFS reachability produced an invalid queue state");
      if (!space.contains(t)) {
        space.add(t);
        frontier.push_back(t);
      }
    }
  }
  return space;
}

FcfsChain build_fcfs_chain(const ModelParams& params, int cap_n) {
  FcfsChain c;
  c.states = fcfs_reachable(params, cap_n);
  for (int i = 0; i < c.states.size(); ++i) {
    for (const auto& [t, rate] : fcfs_transitions(c.states.state(i), params))
      c.transitions.push_back({i, c.states.index_of(t), rate});
  }
  return c;
}

long fcfs_state_count(int n_processors, int cap_n) {
  ModelParams params;
  params.n_processors = n_processors;
  params.think_rate = 0.001;
  params.resume_prob = 0.8;
  params.blocking_service = Exponential{0.1};
  params.writeback_service = Exponential{0.01};
  return fcfs_reachable(params, cap_n).size();
}

double fcfs_anbc(const std::vector<double>& pi, const QueueStateSpace& states) {
  double a = 0;
  for (int i = 0; i < states.size(); ++i)
    a += pi[static_cast<size_t>(i)] * states.state(i).count_blocking();
  return a;
}

std::pair<double, double> fcfs_flow_balance(const std::vector<double>& pi,
                                            const QueueStateSpace& states,
                                            const ModelParams& params) {
  const double mu1 = exponential_rate(params.blocking_service);
  const double mu2 = exponential_rate(params.writeback_service);
  double p_b = 0, p_w = 0, anbc = 0;
  for (int i = 0; i < states.size(); ++i) {
    const auto& s = states.state(i);
    const double w = pi[static_cast<size_t>(i)];
    anbc += w * s.count_blocking();
    if (!s.empty()) {
      if (s.head_is_writeback())
        p_w += w;
      else
        p_b += w;
    }
  }
  const double r1 = std::abs(params.think_rate * (params.n_processors - anbc) -
                             mu1 * p_b);
  const double r2 = std::abs(params.writeback_prob() * mu1 * p_b - mu2 * p_w);
  return {r1, r2};
}

} // namespace busq
