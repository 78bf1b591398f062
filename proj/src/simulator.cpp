#include "busq/simulator.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <deque>
#include <optional>
#include <queue>
#include <vector>

namespace busq {

double exponential_inverse(double rate, double u) {
  return -std::log1p(-u) / rate;
}

double sample(const ServiceSpec& spec, RandomStream& stream) {
  if (const auto* e = std::get_if<Exponential>(&spec))
    return exponential_inverse(e->rate, stream.next_uniform());
  if (const auto* d = std::get_if<Deterministic>(&spec)) return d->duration;
  if (const auto* er = std::get_if<Erlang>(&spec)) {
    double s = 0;
    for (int i = 0; i < er->shape; ++i)
      s += exponential_inverse(er->rate, stream.next_uniform());
    return s;
  }
  const auto& h = std::get<HyperExponential>(spec);
  double u = stream.next_uniform();
  size_t branch = h.weights.size() - 1;
  double acc = 0;
  for (size_t i = 0; i < h.weights.size(); ++i) {
    acc += h.weights[i];
    if (u < acc) {
      branch = i;
      break;
    }
  }
  return exponential_inverse(h.rates[branch], stream.next_uniform());
}

namespace {

struct Request {
  bool is_writeback = false;
  int owner = 0;
  double enqueue_time = 0;
  double service_time = 0;
  double wait = 0; // filled at service start
};

struct Event {
  double time;
  uint64_t seq;
  enum class Type { ThinkEnd, ServiceEnd } type;
  int proc;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

void validate_config(const SimConfig& c) {
  validate(c.params);
  std::vector<std::string> bad;
  if (!(c.warmup >= 0 && c.warmup < c.horizon))
    bad.push_back("warmup must satisfy 0 <= warmup < horizon");
  if (c.replications < 2) bad.push_back("replications must be >= 2");
  if (!(c.ci_level > 0 && c.ci_level < 1))
    bad.push_back("ci_level must be in (0,1)");
  if (!bad.empty()) {
    std::string msg = "invalid simulation config:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw InvalidConfig(msg);
  }
}

} // namespace

ReplicationStats run_replication(const SimConfig& config, int replication_index) {
  validate_config(config);
  const int n = config.params.n_processors;
  const double lam = config.params.think_rate;
  const double q = config.params.writeback_prob();
  const bool priority = config.discipline == Discipline::Priority;

  RandomStream rep_stream = RandomStream::from(config.base_seed,
                                               static_cast<uint64_t>(replication_index));
  // One substream per processor so a processor's draw sequence does not
  // depend on the discipline or on the other processors' interleaving.
  std::vector<RandomStream> proc_stream;
  proc_stream.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    proc_stream.push_back(rep_stream.substream(static_cast<uint64_t>(i)));

  std::priority_queue<Event, std::vector<Event>, EventLater> calendar;
  uint64_t seq = 0;
  for (int i = 0; i < n; ++i) {
    double think = exponential_inverse(lam, proc_stream[static_cast<size_t>(i)].next_uniform());
    calendar.push({think, seq++, Event::Type::ThinkEnd, i});
  }

  std::deque<Request> queue;
  std::optional<Request> in_service;
  std::vector<char> outstanding_b(static_cast<size_t>(n), 0);
  std::vector<char> outstanding_w(static_cast<size_t>(n), 0);
  int blocked = 0;

  double last_t = 0, area_blocked = 0, area_busy = 0;
  double wait_sum_b = 0, wait_sum_w = 0;
  long done_b = 0, done_w = 0;

  auto advance = [&](double t) {
    const double lo = std::max(last_t, config.warmup);
    const double hi = std::min(t, config.horizon);
    if (hi > lo) {
      area_blocked += blocked * (hi - lo);
      if (in_service) area_busy += hi - lo;
    }
    last_t = t;
  };

  auto start_service = [&](Request r, double t) {
    r.wait = t - r.enqueue_time;
    in_service = r;
    calendar.push({t + r.service_time, seq++, Event::Type::ServiceEnd, r.owner});
  };

  auto start_next_queued = [&](double t) {
    if (!in_service && !queue.empty()) {
      Request r = queue.front();
      queue.pop_front();
      start_service(r, t);
    }
  };

  while (!calendar.empty()) {
    Event ev = calendar.top();
    calendar.pop();
    if (ev.time > config.horizon) break;
    advance(ev.time);
    const double t = ev.time;

    if (ev.type == Event::Type::ThinkEnd) {
      auto& ps = proc_stream[static_cast<size_t>(ev.proc)];
      if (outstanding_b[static_cast<size_t>(ev.proc)])
        throw std::logic_error("processor issued a second blocking request");
      outstanding_b[static_cast<size_t>(ev.proc)] = 1;
      ++blocked;
      Request r{false, ev.proc, t, sample(config.params.blocking_service, ps), 0};
      if (!in_service)
        start_service(r, t);
      else
        queue.push_back(r);
    } else {
      Request req = *in_service;
      in_service.reset();
      const bool in_window = t >= config.warmup && t <= config.horizon;
      if (!req.is_writeback) {
        outstanding_b[static_cast<size_t>(req.owner)] = 0;
        --blocked;
        if (in_window) {
          ++done_b;
          wait_sum_b += req.wait;
        }
        auto& ps = proc_stream[static_cast<size_t>(req.owner)];
        const bool makes_wb = ps.next_uniform() < q;
        double wb_service = 0;
        if (makes_wb) wb_service = sample(config.params.writeback_service, ps);
        const double think = exponential_inverse(lam, ps.next_uniform());
        calendar.push({t + think, seq++, Event::Type::ThinkEnd, req.owner});
        if (makes_wb) {
          if (outstanding_w[static_cast<size_t>(req.owner)])
            throw std::logic_error("processor generated a second write-back");
          outstanding_w[static_cast<size_t>(req.owner)] = 1;
          Request w{true, req.owner, t, wb_service, 0};
          if (priority)
            start_service(w, t); // seizes the bus ahead of the queue head
          else
            queue.push_back(w);
        }
        start_next_queued(t);
      } else {
        outstanding_w[static_cast<size_t>(req.owner)] = 0;
        if (in_window) {
          ++done_w;
          wait_sum_w += req.wait;
        }
        start_next_queued(t);
      }
    }
    // Work conservation: the bus may not idle while the queue is nonempty.
    if (!in_service && !queue.empty())
      throw std::logic_error("work conservation violated: idle bus with queued work");
  }
  advance(config.horizon);

  ReplicationStats s;
  const double span = config.horizon - config.warmup;
  s.time_avg_blocked = area_blocked / span;
  s.time_avg_busy = area_busy / span;
  s.blocking_completions = done_b;
  s.writeback_completions = done_w;
  s.mean_wait_blocking = done_b > 0 ? wait_sum_b / done_b : 0;
  s.mean_wait_writeback = done_w > 0 ? wait_sum_w / done_w : 0;
  s.mean_wait_overall =
      done_b + done_w > 0 ? (wait_sum_b + wait_sum_w) / (done_b + done_w) : 0;
  return s;
}

SimAggregate run_simulation(const SimConfig& config) {
  validate_config(config);
  const int r = config.replications;
  std::vector<ReplicationStats> reps;
  reps.reserve(static_cast<size_t>(r));
  for (int i = 0; i < r; ++i) reps.push_back(run_replication(config, i));

  boost::math::students_t_distribution<double> dist(r - 1);
  const double tq = boost::math::quantile(dist, 0.5 + config.ci_level / 2);

  auto summarize = [&](auto field) {
    MetricSummary m;
    for (const auto& rep : reps) m.mean += field(rep);
    m.mean /= r;
    double ss = 0;
    for (const auto& rep : reps) {
      const double d = field(rep) - m.mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (r - 1));
    m.ci_halfwidth = tq * sd / std::sqrt(static_cast<double>(r));
    return m;
  };

  SimAggregate agg;
  agg.anbc = summarize([](const ReplicationStats& x) { return x.time_avg_blocked; });
  agg.utilization = summarize([](const ReplicationStats& x) { return x.time_avg_busy; });
  agg.wait_blocking =
      summarize([](const ReplicationStats& x) { return x.mean_wait_blocking; });
  agg.wait_writeback =
      summarize([](const ReplicationStats& x) { return x.mean_wait_writeback; });
  agg.wait_overall =
      summarize([](const ReplicationStats& x) { return x.mean_wait_overall; });
  agg.replications = r;
  agg.ci_level = config.ci_level;
  return agg;
}

} // namespace busq
