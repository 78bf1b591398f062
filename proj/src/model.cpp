#include "busq/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace busq {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::ostringstream os;
  os << "invalid model parameters:";
  for (const auto& p : parts) os << "\n  " << p;
  return os.str();
}

void check_spec(const ServiceSpec& spec, const char* name,
                std::vector<std::string>& out) {
  if (const auto* e = std::get_if<Exponential>(&spec)) {
    if (!(e->rate > 0))
      out.push_back(std::string("NonPositiveRate: ") + name + " rate must be > 0");
  } else if (const auto* d = std::get_if<Deterministic>(&spec)) {
    if (!(d->duration > 0))
      out.push_back(std::string("NonPositiveRate: ") + name + " duration must be > 0");
  } else if (const auto* er = std::get_if<Erlang>(&spec)) {
    if (er->shape < 1)
      out.push_back(std::string("NonPositiveRate: ") + name + " Erlang shape must be >= 1");
    if (!(er->rate > 0))
      out.push_back(std::string("NonPositiveRate: ") + name + " Erlang rate must be > 0");
  } else if (const auto* h = std::get_if<HyperExponential>(&spec)) {
    if (h->weights.empty() || h->weights.size() != h->rates.size()) {
      out.push_back(std::string("NonPositiveRate: ") + name +
                    " hyperexponential weights/rates must be nonempty and equal length");
      return;
    }
    double wsum = std::accumulate(h->weights.begin(), h->weights.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-12)
      out.push_back(std::string("ProbabilityOutOfRange: ") + name +
                    " hyperexponential weights must sum to 1");
    for (double w : h->weights)
      if (w < 0) {
        out.push_back(std::string("ProbabilityOutOfRange: ") + name +
                      " hyperexponential weights must be >= 0");
        break;
      }
    for (double r : h->rates)
      if (!(r > 0)) {
        out.push_back(std::string("NonPositiveRate: ") + name +
                      " hyperexponential rates must be > 0");
        break;
      }
  }
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

double mean(const ServiceSpec& spec) {
  if (const auto* e = std::get_if<Exponential>(&spec)) return 1.0 / e->rate;
  if (const auto* d = std::get_if<Deterministic>(&spec)) return d->duration;
  if (const auto* er = std::get_if<Erlang>(&spec))
    return static_cast<double>(er->shape) / er->rate;
  const auto& h = std::get<HyperExponential>(spec);
  double m = 0;
  for (size_t i = 0; i < h.weights.size(); ++i) m += h.weights[i] / h.rates[i];
  return m;
}

bool is_exponential(const ServiceSpec& spec) {
  return std::holds_alternative<Exponential>(spec);
}

double exponential_rate(const ServiceSpec& spec) {
  if (const auto* e = std::get_if<Exponential>(&spec)) return e->rate;
  throw std::logic_error("service spec is not exponential");
}

ModelParams validate(const ModelParams& raw) {
  std::vector<std::string> bad;
  if (raw.n_processors < 1)
    bad.push_back("ZeroProcessors: N must be >= 1");
  if (!(raw.think_rate > 0))
    bad.push_back("NonPositiveRate: lambda must be > 0");
  if (!(raw.resume_prob >= 0 && raw.resume_prob <= 1))
    bad.push_back("ProbabilityOutOfRange: p must be in [0,1]");
  check_spec(raw.blocking_service, "blocking service", bad);
  check_spec(raw.writeback_service, "writeback service", bad);
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return raw;
}

} // namespace busq
