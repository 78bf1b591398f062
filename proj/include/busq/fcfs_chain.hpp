// fcfs_chain.hpp — CTMC for the FCFS discipline
//
// The bus serves a single queue in arrival order; write-backs join the tail.
// Blocking requests are exchangeable and write-backs are exchangeable, but
// the interleaving decides service order, so the Markov state is the exact
// queue string over {B, W}. The space is built by BFS from the empty queue.

#pragma once

#include <cstdint>
#include <vector>

#include "busq/ctmc.hpp"
#include "busq/model.hpp"
#include "busq/priority_chain.hpp" // NonExponentialService

namespace busq {

// Queue content encoded as (length, bit pattern): bit i set means position i
// holds a write-back, bit clear a blocking request. Position 0 is the head
// (in service). Length <= 2N <= 64.
struct QueueState {
  uint32_t length = 0;
  uint64_t bits = 0;

  bool operator==(const QueueState&) const = default;

  bool empty() const { return length == 0; }
  bool head_is_writeback() const { return length > 0 && (bits & 1u); }
  int count_writebacks() const;
  int count_blocking() const { return static_cast<int>(length) - count_writebacks(); }

  QueueState pop_head() const {
    return {length - 1, bits >> 1};
  }
  QueueState append_blocking() const {
    return {length + 1, bits};
  }
  QueueState append_writeback() const {
    return {length + 1, bits | (uint64_t{1} << length)};
  }
};

struct QueueStateHash {
  size_t operator()(const QueueState& s) const {
    uint64_t x = s.bits * 0x9e3779b97f4a7c15ull + s.length;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return static_cast<size_t>(x);
  }
};

using QueueStateSpace = StateSpace<QueueState, QueueStateHash>;

class StateSpaceCapExceeded : public std::runtime_error {
 public:
  explicit StateSpaceCapExceeded(const std::string& what)
      : std::runtime_error(what) {}
};

// Outgoing transitions of one queue state:
//   arrival of a B at (N - #B) lambda while #B < N;
//   head B completes at p mu1 (drop) or q mu1 (drop and append W);
//   head W completes at mu2.
std::vector<std::pair<QueueState, double>> fcfs_transitions(
    const QueueState& s, const ModelParams& params);

// BFS closure from the empty queue. Throws StateSpaceCapExceeded when
// N exceeds cap_n, and asserts count(W) <= N on every discovered state.
QueueStateSpace fcfs_reachable(const ModelParams& params, int cap_n = 10);

struct FcfsChain {
  QueueStateSpace states;
  std::vector<Transition> transitions;
};

FcfsChain build_fcfs_chain(const ModelParams& params, int cap_n = 10);

// |reachable(N)| for otherwise-default parameters.
long fcfs_state_count(int n_processors, int cap_n = 10);

// E[#B] under pi: each queued blocking request is one blocked processor.
double fcfs_anbc(const std::vector<double>& pi, const QueueStateSpace& states);

// Same cut residuals as the priority chain; P(blocking service) is the
// probability the head of the queue is a B, P(writeback service) that it is
// a W.
std::pair<double, double> fcfs_flow_balance(const std::vector<double>& pi,
                                            const QueueStateSpace& states,
                                            const ModelParams& params);

} // namespace busq
