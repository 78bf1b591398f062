// model.hpp — model parameters and service-time distribution specs
//
// A closed network of N processors sharing one bus. Each processor thinks
// for Exp(lambda), issues a blocking request (service f1), and on completion
// resumes thinking; with probability q = 1-p the completion also generates a
// write-back (service f2) that occupies the bus but not the processor.

#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace busq {

struct Exponential {
  double rate; // [1/t.u.]
};

struct Deterministic {
  double duration; // [t.u.]
};

struct Erlang {
  int shape;
  double rate; // per-stage rate [1/t.u.]
};

struct HyperExponential {
  std::vector<double> weights; // sum to 1
  std::vector<double> rates;   // same length, all > 0
};

using ServiceSpec =
    std::variant<Exponential, Deterministic, Erlang, HyperExponential>;

enum class Discipline { Fcfs, Priority };

inline const char* to_string(Discipline d) {
  return d == Discipline::Fcfs ? "fcfs" : "priority";
}

struct ModelParams {
  int n_processors = 0;     // N >= 1
  double think_rate = 0;    // lambda [1/t.u.]
  double resume_prob = 0;   // p in [0,1]
  ServiceSpec blocking_service;  // f1
  ServiceSpec writeback_service; // f2

  double writeback_prob() const { return 1.0 - resume_prob; } // q
};

// Thrown by validate(); carries every violated constraint, each message
// prefixed with its code (ZeroProcessors, NonPositiveRate,
// ProbabilityOutOfRange).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Analytic mean of a service-time distribution [t.u.].
double mean(const ServiceSpec& spec);

// True iff the spec is a plain Exponential (the only case the analytical
// chain builders accept).
bool is_exponential(const ServiceSpec& spec);

// Rate of an Exponential spec; throws std::logic_error otherwise.
double exponential_rate(const ServiceSpec& spec);

// Checks all constraints; returns the params unchanged if they hold,
// otherwise throws ValidationError listing every violation.
ModelParams validate(const ModelParams& raw);

} // namespace busq
