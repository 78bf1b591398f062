// test_util.hpp — independent oracles used by the test suites
//
// Everything here deliberately avoids the solver paths under test: the dense
// solve is plain Gaussian elimination, the repairman distribution is the
// textbook closed form.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "busq/ctmc.hpp"

namespace busq::testing {

// Stationary vector by dense Gaussian elimination with partial pivoting on
// Q^T pi^T = 0 with the last equation replaced by sum(pi) = 1.
inline std::vector<double> dense_stationary(const Generator& g) {
  const int n = g.size();
  std::vector<std::vector<double>> a(static_cast<size_t>(n),
                                     std::vector<double>(static_cast<size_t>(n) + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    a[static_cast<size_t>(i)][static_cast<size_t>(i)] -= g.exit_rate(i);
    for (const auto& [j, r] : g.row(i))
      a[static_cast<size_t>(j)][static_cast<size_t>(i)] += r; // Q^T
  }
  for (int j = 0; j < n; ++j) a[static_cast<size_t>(n) - 1][static_cast<size_t>(j)] = 1.0;
  a[static_cast<size_t>(n) - 1][static_cast<size_t>(n)] = 1.0;

  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[static_cast<size_t>(r)][static_cast<size_t>(c)]) >
          std::abs(a[static_cast<size_t>(pivot)][static_cast<size_t>(c)]))
        pivot = r;
    std::swap(a[static_cast<size_t>(c)], a[static_cast<size_t>(pivot)]);
    if (a[static_cast<size_t>(c)][static_cast<size_t>(c)] == 0)
      throw std::runtime_error("singular system in dense oracle");
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[static_cast<size_t>(r)][static_cast<size_t>(c)] /
                       a[static_cast<size_t>(c)][static_cast<size_t>(c)];
      if (f == 0) continue;
      for (int k = c; k <= n; ++k)
        a[static_cast<size_t>(r)][static_cast<size_t>(k)] -=
            f * a[static_cast<size_t>(c)][static_cast<size_t>(k)];
    }
  }
  std::vector<double> pi(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    pi[static_cast<size_t>(i)] = a[static_cast<size_t>(i)][static_cast<size_t>(n)] /
                                 a[static_cast<size_t>(i)][static_cast<size_t>(i)];
  return pi;
}

// Finite-source M/M/1//N blocked-count distribution:
// pi_k proportional to (N!/(N-k)!) (lambda/mu)^k.
inline std::vector<double> machine_repairman(int n, double lambda, double mu) {
  std::vector<double> pi(static_cast<size_t>(n) + 1);
  double term = 1.0, total = 0.0;
  for (int k = 0; k <= n; ++k) {
    pi[static_cast<size_t>(k)] = term;
    total += term;
    term *= (n - k) * lambda / mu;
  }
  for (auto& v : pi) v /= total;
  return pi;
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double eps, int depth = 24) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fhi, double fmid, double acc,
          int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4 * frm + fhi);
    if (d <= 0 || std::abs(left + right - acc) < 15 * eps)
      return left + right + (left + right - acc) / 15.0;
    return rec(lo, mid, flo, fmid, flm, left, d - 1) +
           rec(mid, hi, fmid, fhi, frm, right, d - 1);
  };
  return rec(a, b, fa, fb, fm, whole, depth);
}

} // namespace busq::testing
