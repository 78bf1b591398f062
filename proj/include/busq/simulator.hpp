// simulator.hpp — discrete-event simulation of both bus disciplines
//
// The numerical oracle: accepts any ServiceSpec for f1/f2 and estimates
// ANBC, bus utilization, and per-class waiting times by independent
// replications with Student-t confidence intervals.

#pragma once

#include <cstdint>

#include "busq/model.hpp"
#include "busq/rng.hpp"

namespace busq {

struct SimConfig {
  ModelParams params;
  Discipline discipline = Discipline::Fcfs;
  double horizon = 2e6;  // [t.u.]
  double warmup = 1e5;   // discarded [t.u.]
  int replications = 20; // >= 2
  uint64_t base_seed = 1;
  double ci_level = 0.99;
};

class InvalidConfig : public std::runtime_error {
 public:
  explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

struct ReplicationStats {
  double time_avg_blocked = 0; // ANBC estimate
  double time_avg_busy = 0;    // bus utilization
  double mean_wait_blocking = 0;
  double mean_wait_writeback = 0;
  double mean_wait_overall = 0; // completion-weighted mean of the two classes
  long blocking_completions = 0;
  long writeback_completions = 0;
};

struct MetricSummary {
  double mean = 0;
  double ci_halfwidth = 0;
};

struct SimAggregate {
  MetricSummary anbc;
  MetricSummary utilization;
  MetricSummary wait_blocking;
  MetricSummary wait_writeback;
  MetricSummary wait_overall;
  int replications = 0;
  double ci_level = 0;
};

// One variate from the service distribution, by inverse transform for the
// exponential branches.
double sample(const ServiceSpec& spec, RandomStream& stream);

// Exponential inverse transform -ln(1-u)/rate, exposed for testing.
double exponential_inverse(double rate, double u);

// One replication; deterministic given (config.base_seed, replication_index).
ReplicationStats run_replication(const SimConfig& config, int replication_index);

// All replications plus Student-t intervals over the replication means.
SimAggregate run_simulation(const SimConfig& config);

} // namespace busq
