// ctmc.hpp — continuous-time Markov chain assembly and solution
//
// Generators are stored sparsely (off-diagonal rates only; the diagonal is
// implied by the zero row-sum convention). Stationary solves come in two
// flavours: GTH elimination (subtraction-free, dense, for small chains) and
// power iteration on the uniformized transition matrix. Transients use
// uniformization with log-space Poisson weights.

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace busq {

class CtmcError : public std::runtime_error {
 public:
  enum class Code {
    UnknownState,
    NonPositiveRate,
    SelfLoop,
    TooLargeForDirect,
    ReducibleChain,
    NoConvergence,
    NegativeTime,
  };
  CtmcError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Dense index <-> opaque descriptor map. Descriptors must be hashable and
// equality-comparable.
template <typename S, typename Hash = std::hash<S>>
class StateSpace {
 public:
  int add(const S& s) {
    auto [it, inserted] = index_.emplace(s, static_cast<int>(states_.size()));
    if (inserted) states_.push_back(s);
    return it->second;
  }

  int index_of(const S& s) const {
    auto it = index_.find(s);
    if (it == index_.end())
      throw CtmcError(CtmcError::Code::UnknownState, "state not in state space");
    return it->second;
  }

  bool contains(const S& s) const { return index_.count(s) != 0; }
  const S& state(int i) const { return states_.at(static_cast<size_t>(i)); }
  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<S>& states() const { return states_; }

 private:
  std::vector<S> states_;
  std::unordered_map<S, int, Hash> index_;
};

struct Transition {
  int from;
  int to;
  double rate;
};

// Sparse generator matrix Q. Off-diagonal rates only; diagonal entries are
// the negated row sums.
class Generator {
 public:
  // Validates endpoints/rates and sums parallel transitions.
  static Generator assemble(int n_states, const std::vector<Transition>& ts);

  int size() const { return n_; }
  double exit_rate(int i) const { return exit_[static_cast<size_t>(i)]; }
  double max_exit_rate() const;
  const std::vector<std::pair<int, double>>& row(int i) const {
    return rows_[static_cast<size_t>(i)];
  }

  // ||pi * Q||_inf for a candidate stationary vector.
  double residual_inf(const std::vector<double>& pi) const;

  // y = x * Q (row vector times generator).
  std::vector<double> apply_left(const std::vector<double>& x) const;

 private:
  int n_ = 0;
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<double> exit_;
};

struct SolveOptions {
  double tolerance = 1e-12;       // residual ||pi Q||_inf
  long max_iterations = 10'000'000;
  int direct_cap = 5000;          // GTH refuses larger chains
};

struct StationaryDistribution {
  std::vector<double> pi;
  double residual = 0;   // ||pi Q||_inf after normalization
  long iterations = 0;   // 0 for direct solves
};

// GTH (Grassmann-Taksar-Heyman) elimination. Subtraction-free, so the
// 8-decimal reference values survive. Throws ReducibleChain on a zero pivot
// and TooLargeForDirect above opts.direct_cap.
StationaryDistribution stationary_direct(const Generator& g,
                                         const SolveOptions& opts = {});

// Power iteration on P = I + Q/Lambda with Lambda = 1.01 * max exit rate.
// Throws NoConvergence if the residual target is not met in time.
StationaryDistribution stationary_iterative(const Generator& g,
                                            const SolveOptions& opts = {});

// pi(t) = pi0 * exp(Qt) by uniformization; truncation error <= trunc_eps.
std::vector<double> transient(const Generator& g, const std::vector<double>& pi0,
                              double t, double trunc_eps = 1e-10);

// Sum_i pi_i f(i).
double expect(const std::vector<double>& pi,
              const std::function<double(int)>& f);

} // namespace busq
