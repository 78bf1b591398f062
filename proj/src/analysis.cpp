#include "busq/analysis.hpp"

#include <cmath>

namespace busq {

double anpec(int n_processors, double anbc) {
  if (!(anbc >= 0 && anbc <= n_processors))
    throw AnalysisError(AnalysisError::Code::OutOfRangeAnbc,
                        "ANBC must lie in [0, N]");
  return n_processors - anbc;
}

double pct_difference(double anbc_fcfs, double anbc_priority) {
  if (anbc_fcfs == 0)
    throw AnalysisError(AnalysisError::Code::DivisionByZero,
                        "pct_difference undefined for ANBC_fcfs = 0");
  return (anbc_priority - anbc_fcfs) / anbc_fcfs * 100.0;
}

std::optional<int> saturation_point(const AnpecCurve& curve, double epsilon) {
  if (curve.points.size() < 2)
    throw AnalysisError(AnalysisError::Code::TooFewPoints,
                        "saturation point needs at least two curve points");
  for (size_t i = 1; i < curve.points.size(); ++i) {
    if (curve.points[i].second - curve.points[i - 1].second < epsilon)
      return curve.points[i].first;
  }
  return std::nullopt;
}

namespace {
bool same_params(const ModelParams& a, const ModelParams& b) {
  return a.n_processors == b.n_processors && a.think_rate == b.think_rate &&
         a.resume_prob == b.resume_prob &&
         mean(a.blocking_service) == mean(b.blocking_service) &&
         mean(a.writeback_service) == mean(b.writeback_service);
}
} // namespace

ConservationReport conservation_report(const ModelParams& fcfs_params,
                                       const SimAggregate& fcfs,
                                       const ModelParams& priority_params,
                                       const SimAggregate& priority) {
  if (!same_params(fcfs_params, priority_params))
    throw AnalysisError(AnalysisError::Code::MismatchedParams,
                        "conservation report requires identical model parameters");
  ConservationReport rep;
  rep.params = fcfs_params;
  rep.fcfs = fcfs;
  rep.priority = priority;
  rep.overall_wait_difference =
      priority.wait_overall.mean - fcfs.wait_overall.mean;
  return rep;
}

} // namespace busq
