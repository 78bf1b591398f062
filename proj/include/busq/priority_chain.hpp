// priority_chain.hpp — CTMC for the priority discipline
//
// A write-back generated at a blocking completion seizes the bus immediately;
// the queue head waits until it finishes. States:
//   Idle                — bus free, everyone thinking
//   ServingBlocking{k}  — a blocking request in service, k blocked in total
//                         (including the one in service), 1 <= k <= N
//   ServingWriteback{j} — a write-back in service, j blocked behind it,
//                         0 <= j <= N (the write-back's owner is thinking
//                         and may block again, hence j can reach N)
// 2N+2 states in total.

#pragma once

#include <utility>
#include <vector>

#include "busq/ctmc.hpp"
#include "busq/model.hpp"

namespace busq {

struct PriorityState {
  enum class Kind { Idle, ServingBlocking, ServingWriteback };
  Kind kind = Kind::Idle;
  int count = 0; // k for ServingBlocking, j for ServingWriteback, 0 for Idle

  bool operator==(const PriorityState&) const = default;
};

struct PriorityStateHash {
  size_t operator()(const PriorityState& s) const {
    return static_cast<size_t>(s.kind) * 1000003u + static_cast<size_t>(s.count);
  }
};

using PriorityStateSpace = StateSpace<PriorityState, PriorityStateHash>;

// Whether the processor that generated a write-back keeps blocking while the
// write-back is served. The model here resumes it (2N+2 states); the held
// variant (2N+1 states) is kept solely so the alternative reading can be
// compared against the reference tables.
enum class WritebackOwner { Resumes, Held };

class NonExponentialService : public std::runtime_error {
 public:
  NonExponentialService()
      : std::runtime_error(
            "analytical chain builders require exponential f1 and f2; "
            "use the simulator for other distributions") {}
};

struct PriorityChain {
  PriorityStateSpace states;
  std::vector<Transition> transitions;
};

PriorityChain build_priority_chain(const ModelParams& params,
                                   WritebackOwner owner = WritebackOwner::Resumes);

// Average number of blocked processors under pi. The write-back owner counts
// as computing under WritebackOwner::Resumes.
double priority_anbc(const std::vector<double>& pi, const PriorityStateSpace& states,
                     WritebackOwner owner = WritebackOwner::Resumes);

// Steady-state cut residuals:
//   r1 = |lambda (N - ANBC) - mu1 P(ServingBlocking)|
//   r2 = |q mu1 P(ServingBlocking) - mu2 P(ServingWriteback)|
std::pair<double, double> priority_flow_balance(const std::vector<double>& pi,
                                                const PriorityStateSpace& states,
                                                const ModelParams& params);

} // namespace busq
