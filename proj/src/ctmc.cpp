#include "busq/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace busq {

Generator Generator::assemble(int n_states, const std::vector<Transition>& ts) {
  Generator g;
  g.n_ = n_states;
  g.rows_.assign(static_cast<size_t>(n_states), {});
  g.exit_.assign(static_cast<size_t>(n_states), 0.0);

  for (const auto& t : ts) {
    if (t.from < 0 || t.from >= n_states || t.to < 0 || t.to >= n_states)
      throw CtmcError(CtmcError::Code::UnknownState,
                      "transition endpoint outside state space");
    if (t.from == t.to)
      throw CtmcError(CtmcError::Code::SelfLoop,
                      "self-transition in generator input");
    if (!(t.rate > 0))
      throw CtmcError(CtmcError::Code::NonPositiveRate,
                      "transition rate must be > 0");
    auto& row = g.rows_[static_cast<size_t>(t.from)];
    auto it = std::find_if(row.begin(), row.end(),
                           [&](const auto& e) { return e.first == t.to; });
    if (it != row.end())
      it->second += t.rate; // parallel transitions sum
    else
      row.emplace_back(t.to, t.rate);
    g.exit_[static_cast<size_t>(t.from)] += t.rate;
  }
  for (auto& row : g.rows_)
    std::sort(row.begin(), row.end());
  return g;
}

double Generator::max_exit_rate() const {
  double m = 0;
  for (double e : exit_) m = std::max(m, e);
  return m;
}

std::vector<double> Generator::apply_left(const std::vector<double>& x) const {
  std::vector<double> y(static_cast<size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const double xi = x[static_cast<size_t>(i)];
    if (xi == 0) continue;
    y[static_cast<size_t>(i)] -= xi * exit_[static_cast<size_t>(i)];
    for (const auto& [j, r] : rows_[static_cast<size_t>(i)])
      y[static_cast<size_t>(j)] += xi * r;
  }
  return y;
}

double Generator::residual_inf(const std::vector<double>& pi) const {
  auto y = apply_left(pi);
  double m = 0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

StationaryDistribution stationary_direct(const Generator& g,
                                         const SolveOptions& opts) {
  const int n = g.size();
  if (n > opts.direct_cap)
    throw CtmcError(CtmcError::Code::TooLargeForDirect,
                    "chain has " + std::to_string(n) +
                        " states, above the direct-solve cap of " +
                        std::to_string(opts.direct_cap));

  // Dense copy of the off-diagonal rates.
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<size_t>(i) * n + static_cast<size_t>(j)];
  };
  for (int i = 0; i < n; ++i)
    for (const auto& [j, r] : g.row(i)) at(i, j) = r;

  // GTH elimination: censor states n-1 .. 1 in turn. No subtractions occur,
  // so cancellation cannot corrupt the small probabilities.
  for (int k = n - 1; k >= 1; --k) {
    double s = 0;
    for (int j = 0; j < k; ++j) s += at(k, j);
    if (!(s > 0))
      throw CtmcError(CtmcError::Code::ReducibleChain,
                      "zero pivot during GTH elimination (chain not irreducible)");
    for (int i = 0; i < k; ++i) at(i, k) /= s;
    const double* rowk = &a[static_cast<size_t>(k) * n];
    for (int i = 0; i < k; ++i) {
      const double f = at(i, k);
      if (f == 0) continue;
      double* rowi = &a[static_cast<size_t>(i) * n];
      for (int j = 0; j < k; ++j) rowi[j] += f * rowk[j];
      rowi[i] = 0; // diagonal is implicit, keep it clear
    }
  }

  StationaryDistribution out;
  out.pi.assign(static_cast<size_t>(n), 0.0);
  out.pi[0] = 1.0;
  for (int k = 1; k < n; ++k) {
    double s = 0;
    for (int i = 0; i < k; ++i) s += out.pi[static_cast<size_t>(i)] * at(i, k);
    out.pi[static_cast<size_t>(k)] = s;
  }
  double total = std::accumulate(out.pi.begin(), out.pi.end(), 0.0);
  for (double& v : out.pi) v /= total;
  out.residual = g.residual_inf(out.pi);
  return out;
}

StationaryDistribution stationary_iterative(const Generator& g,
                                            const SolveOptions& opts) {
  const int n = g.size();
  const double max_exit = g.max_exit_rate();
  StationaryDistribution out;
  out.pi.assign(static_cast<size_t>(n), 1.0 / n);
  if (max_exit == 0) { // absorbing everywhere; only the singleton is legal
    if (n == 1) return out;
    throw CtmcError(CtmcError::Code::ReducibleChain, "generator has no transitions");
  }
  const double lam = 1.01 * max_exit; // strictly above max exit: aperiodic P

  std::vector<double> next(static_cast<size_t>(n));
  for (long it = 1; it <= opts.max_iterations; ++it) {
    // next = pi * P with P = I + Q/lam
    for (int i = 0; i < n; ++i)
      next[static_cast<size_t>(i)] =
          out.pi[static_cast<size_t>(i)] * (1.0 - g.exit_rate(i) / lam);
    for (int i = 0; i < n; ++i) {
      const double xi = out.pi[static_cast<size_t>(i)];
      if (xi == 0) continue;
      for (const auto& [j, r] : g.row(i))
        next[static_cast<size_t>(j)] += xi * r / lam;
    }
    double total = std::accumulate(next.begin(), next.end(), 0.0);
    for (double& v : next) v /= total;
    out.pi.swap(next);
    if (it % 50 == 0 || it == opts.max_iterations) {
      out.residual = g.residual_inf(out.pi);
      out.iterations = it;
      if (out.residual <= opts.tolerance) return out;
    }
  }
  throw CtmcError(CtmcError::Code::NoConvergence,
                  "power iteration did not reach residual " +
                      std::to_string(opts.tolerance) + " in " +
                      std::to_string(opts.max_iterations) + " iterations");
}

std::vector<double> transient(const Generator& g, const std::vector<double>& pi0,
                              double t, double trunc_eps) {
  if (t < 0)
    throw CtmcError(CtmcError::Code::NegativeTime, "transient time must be >= 0");
  if (static_cast<int>(pi0.size()) != g.size())
    throw std::invalid_argument("initial distribution has wrong dimension");
  if (t == 0) return pi0;

  const double max_exit = g.max_exit_rate();
  if (max_exit == 0) return pi0;
  const double lam = 1.01 * max_exit;
  const double lt = lam * t;

  // Accumulate sum_k Poisson(lt; k) * pi0 P^k with log-space weights so that
  // huge lt does not underflow the k=0 term.
  std::vector<double> out(pi0.size(), 0.0);
  std::vector<double> v = pi0;
  std::vector<double> next(pi0.size());
  const int n = g.size();
  double logw = -lt; // log Poisson pmf at k=0
  double covered = 0;
  const long k_max =
      static_cast<long>(lt + 12.0 * std::sqrt(lt + 1.0) + 64.0);
  for (long k = 0;; ++k) {
    const double w = std::exp(logw);
    if (w > 0) {
      for (size_t i = 0; i < out.size(); ++i) out[i] += w * v[i];
      covered += w;
    }
    if (covered >= 1.0 - trunc_eps || k >= k_max) break;
    // v <- v * P
    for (int i = 0; i < n; ++i)
      next[static_cast<size_t>(i)] =
          v[static_cast<size_t>(i)] * (1.0 - g.exit_rate(i) / lam);
    for (int i = 0; i < n; ++i) {
      const double xi = v[static_cast<size_t>(i)];
      if (xi == 0) continue;
      for (const auto& [j, r] : g.row(i))
        next[static_cast<size_t>(j)] += xi * r / lam;
    }
    v.swap(next);
    logw += std::log(lt) - std::log(static_cast<double>(k + 1));
  }
  return out;
}

double expect(const std::vector<double>& pi,
              const std::function<double(int)>& f) {
  double s = 0;
  for (size_t i = 0; i < pi.size(); ++i) s += pi[i] * f(static_cast<int>(i));
  return s;
}

} // namespace busq
