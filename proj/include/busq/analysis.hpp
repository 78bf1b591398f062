// analysis.hpp — derived metrics and discipline comparison

#pragma once

#include <optional>
#include <vector>

#include "busq/model.hpp"
#include "busq/simulator.hpp"

namespace busq {

class AnalysisError : public std::runtime_error {
 public:
  enum class Code {
    OutOfRangeAnbc,
    DivisionByZero,
    TooFewPoints,
    MismatchedParams,
  };
  AnalysisError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct ComparisonRow {
  double lambda = 0;
  double anbc_fcfs = 0;
  double anbc_priority = 0;
  double pct_difference = 0;
};

struct AnpecCurve {
  double lambda = 0;
  double p = 0;
  double mu2 = 0;
  Discipline discipline = Discipline::Priority;
  std::vector<std::pair<int, double>> points; // (N, anpec), consecutive N
};

// ANPEC = N - ANBC.
double anpec(int n_processors, double anbc);

// (priority - fcfs) / fcfs * 100.
double pct_difference(double anbc_fcfs, double anbc_priority);

// Smallest N whose ANPEC gain over N-1 drops below epsilon; nullopt if the
// curve never flattens that far.
std::optional<int> saturation_point(const AnpecCurve& curve, double epsilon);

// Side-by-side mean waits of the two disciplines on the same model. The
// equal-mean-wait conservation claim is reported, never asserted.
struct ConservationReport {
  ModelParams params;
  SimAggregate fcfs;
  SimAggregate priority;
  double overall_wait_difference = 0; // priority minus fcfs, point estimate
};

ConservationReport conservation_report(const ModelParams& fcfs_params,
                                       const SimAggregate& fcfs,
                                       const ModelParams& priority_params,
                                       const SimAggregate& priority);

} // namespace busq
