#include "busq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "busq/analysis.hpp"
#include "busq/ctmc.hpp"
#include "busq/fcfs_chain.hpp"
#include "busq/priority_chain.hpp"
#include "busq/reference_table.hpp"
#include "busq/simulator.hpp"

namespace busq {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::runtime_error("bad number '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("empty list");
  return out;
}

ModelParams make_params(int n, double lambda, double mu1, double mu2, double p) {
  ModelParams m;
  m.n_processors = n;
  m.think_rate = lambda;
  m.resume_prob = p;
  m.blocking_service = Exponential{mu1};
  m.writeback_service = Exponential{mu2};
  return validate(m);
}

struct Solved {
  double anbc = 0;
  double utilization = 0;
};

// method: "direct", "iterative" or "auto" (direct for priority and small
// FCFS chains, iterative for FCFS with N >= 5).
Solved solve_chain(const ModelParams& params, Discipline d,
                   const std::string& method) {
  SolveOptions opts;
  auto pick = [&](int n_states) {
    if (method == "direct") return true;
    if (method == "iterative") return false;
    if (d == Discipline::Priority) return true;
    return params.n_processors < 5 && n_states <= opts.direct_cap;
  };
  Solved out;
  if (d == Discipline::Priority) {
    auto chain = build_priority_chain(params);
    auto g = Generator::assemble(chain.states.size(), chain.transitions);
    auto sol = pick(g.size()) ? stationary_direct(g, opts)
                              : stationary_iterative(g, opts);
    out.anbc = priority_anbc(sol.pi, chain.states);
    const int idle = chain.states.index_of({PriorityState::Kind::Idle, 0});
    out.utilization = 1.0 - sol.pi[static_cast<size_t>(idle)];
  } else {
    auto chain = build_fcfs_chain(params);
    auto g = Generator::assemble(chain.states.size(), chain.transitions);
    auto sol = pick(g.size()) ? stationary_direct(g, opts)
                              : stationary_iterative(g, opts);
    out.anbc = fcfs_anbc(sol.pi, chain.states);
    const int empty = chain.states.index_of(QueueState{});
    out.utilization = 1.0 - sol.pi[static_cast<size_t>(empty)];
  }
  return out;
}

Discipline parse_discipline(const std::string& s) {
  if (s == "fcfs") return Discipline::Fcfs;
  if (s == "priority") return Discipline::Priority;
  throw CLI::ValidationError("--discipline", "must be 'fcfs' or 'priority'");
}

constexpr const char* kRunRecordHeader =
    "discipline,method,n,lambda,mu1,mu2,p,anbc,anpec,utilization,ci_halfwidth,seed";

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string discipline;
  int n = 0;
  double lambda = 0, mu1 = 0, mu2 = 0, p = 0;
  std::string method = "auto";
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Discipline d = parse_discipline(a.discipline);
  const ModelParams params = make_params(a.n, a.lambda, a.mu1, a.mu2, a.p);
  const Solved s = solve_chain(params, d, a.method);
  out << kRunRecordHeader << "\n";
  out << a.discipline << ",analytic," << a.n << ',' << fmt(a.lambda) << ','
      << fmt(a.mu1) << ',' << fmt(a.mu2) << ',' << fmt(a.p) << ','
      << fmt(s.anbc) << ',' << fmt(anpec(a.n, s.anbc)) << ','
      << fmt(s.utilization) << ",,\n";
  return 0;
}

// ------------------------------------------------------- validate-tables

struct ValidateArgs {
  double tolerance = 1e-4;     // relative, ANBC cells
  double pct_tolerance = 1e-3; // absolute percentage points
};

// Number of worker threads for parameter sweeps: BCM_THREADS if set,
// otherwise the hardware concurrency.
unsigned sweep_threads(size_t work_items) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BCM_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return std::min<size_t>(n, work_items);
}

int cmd_validate_tables(const ValidateArgs& a, std::ostream& out,
                        std::ostream& err) {
  out << "# reference: tables 1.a-1.h; mu2 values 0.006667/0.006666/"
         "0.0066666667 all normalized to 1/150\n";
  out << "table,n,mu2,lambda,cell,reference,computed,error,within_tolerance\n";

  struct Cell {
    double fcfs, priority, pct;
  };
  std::vector<Cell> cells(kReferenceTable.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= kReferenceTable.size()) return;
      const auto& row = kReferenceTable[i];
      const ModelParams params =
          make_params(row.n_processors, row.lambda, kRefMu1, row.mu2, kRefP);
      cells[i].fcfs = solve_chain(params, Discipline::Fcfs, "auto").anbc;
      cells[i].priority = solve_chain(params, Discipline::Priority, "auto").anbc;
      cells[i].pct = pct_difference(cells[i].fcfs, cells[i].priority);
    }
  };
  const unsigned nthreads = sweep_threads(kReferenceTable.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  double max_rel = 0, max_pct = 0;
  int failures = 0;
  for (size_t i = 0; i < kReferenceTable.size(); ++i) {
    const auto& row = kReferenceTable[i];
    const double fc = cells[i].fcfs;
    const double pr = cells[i].priority;
    const double pct = cells[i].pct;

    auto emit = [&](const char* cell, double ref, double got, double errv,
                    double tol) {
      const bool ok = errv <= tol;
      if (!ok) ++failures;
      out << row.table_id << ',' << row.n_processors << ',' << fmt(row.mu2)
          << ',' << fmt(row.lambda) << ',' << cell << ',' << fmt(ref) << ','
          << fmt(got) << ',' << fmt(errv) << ',' << (ok ? "yes" : "no")
          << "\n";
    };
    const double ef = std::abs(fc - row.anbc_fcfs) / row.anbc_fcfs;
    const double ep = std::abs(pr - row.anbc_priority) / row.anbc_priority;
    const double eq = std::abs(pct - row.pct_difference);
    max_rel = std::max({max_rel, ef, ep});
    max_pct = std::max(max_pct, eq);
    emit("anbc_fcfs", row.anbc_fcfs, fc, ef, a.tolerance);
    emit("anbc_priority", row.anbc_priority, pr, ep, a.tolerance);
    emit("pct_difference", row.pct_difference, pct, eq, a.pct_tolerance);
  }
  err << "validate-tables: max relative ANBC error " << fmt(max_rel)
      << ", max absolute %-difference error " << fmt(max_pct) << ", "
      << failures << " cell(s) out of tolerance\n";
  return failures == 0 ? 0 : 1;
}

// ------------------------------------------------------------ figure-data

struct FigureArgs {
  std::string p_list = "0.8,0.9";
  std::string mu2_list = "0.01,0.0066666667";
  std::string lambda_list =
      "0.001,0.002,0.003,0.004,0.005,0.006,0.007,0.008,0.009,0.010";
  int n_max = 12;
  std::string discipline = "priority";
  double mu1 = 0.1;
  std::string out_dir = ".";
  bool svg = false;
};

void write_svg(const std::string& path, const std::string& title,
               const std::vector<double>& lambdas,
               const std::vector<std::vector<std::pair<int, double>>>& curves,
               int n_max) {
  std::ofstream f(path);
  const int w = 640, h = 480, ml = 60, mr = 20, mt = 40, mb = 50;
  const double xmax = n_max, ymax = n_max;
  auto px = [&](double n) { return ml + n / xmax * (w - ml - mr); };
  auto py = [&](double v) { return h - mb - v / ymax * (h - mt - mb); };
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
    << h << "'>\n";
  f << "<text x='" << w / 2 << "' y='20' text-anchor='middle'>" << title
    << "</text>\n";
  f << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
    << "' y2='" << h - mb << "' stroke='black'/>\n";
  f << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
    << h - mb << "' stroke='black'/>\n";
  f << "<text x='" << w / 2 << "' y='" << h - 12
    << "' text-anchor='middle'>N</text>\n";
  f << "<text x='16' y='" << h / 2 << "' transform='rotate(-90 16 " << h / 2
    << ")' text-anchor='middle'>ANPEC</text>\n";
  for (int n = 0; n <= n_max; n += 2) {
    f << "<text x='" << px(n) << "' y='" << h - mb + 16
      << "' text-anchor='middle' font-size='10'>" << n << "</text>\n";
    f << "<text x='" << ml - 8 << "' y='" << py(n) + 4
      << "' text-anchor='end' font-size='10'>" << n << "</text>\n";
  }
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};
  for (size_t c = 0; c < curves.size(); ++c) {
    f << "<polyline fill='none' stroke='" << colors[c % 10] << "' points='";
    for (const auto& [n, v] : curves[c]) f << px(n) << ',' << py(v) << ' ';
    f << "'/>\n";
    f << "<text x='" << w - mr - 4 << "' y='" << mt + 14 * (c + 1)
      << "' text-anchor='end' font-size='10' fill='" << colors[c % 10]
      << "'>lambda=" << fmt(lambdas[c]) << "</text>\n";
  }
  f << "</svg>\n";
}

int cmd_figure_data(const FigureArgs& a, std::ostream& out, std::ostream& err) {
  const Discipline d = parse_discipline(a.discipline);
  const auto ps = parse_double_list(a.p_list);
  const auto mu2s = parse_double_list(a.mu2_list);
  const auto lambdas = parse_double_list(a.lambda_list);
  if (a.n_max < 1) throw std::runtime_error("--n-max must be >= 1");
  for (double l : lambdas)
    if (!(l > 0)) throw std::runtime_error("lambda values must be > 0");
  for (double p : ps)
    if (!(p >= 0 && p <= 1)) throw std::runtime_error("p values must be in [0,1]");

  for (double p : ps) {
    for (double mu2 : mu2s) {
      std::vector<std::vector<std::pair<int, double>>> curves;
      for (double lambda : lambdas) {
        std::vector<std::pair<int, double>> curve;
        for (int n = 1; n <= a.n_max; ++n) {
          const ModelParams params = make_params(n, lambda, a.mu1, mu2, p);
          const Solved s = solve_chain(params, d, "auto");
          curve.emplace_back(n, anpec(n, s.anbc));
        }
        curves.push_back(std::move(curve));
      }
      std::ostringstream name;
      name << "anpec_" << to_string(d) << "_p" << fmt(p) << "_mu2" << fmt(mu2);
      const std::string csv_path = a.out_dir + "/" + name.str() + ".csv";
      std::ofstream f(csv_path);
      if (!f) throw std::runtime_error("cannot write " + csv_path);
      f << "n,lambda,anpec\n";
      for (size_t c = 0; c < curves.size(); ++c)
        for (const auto& [n, v] : curves[c])
          f << n << ',' << fmt(lambdas[c]) << ',' << fmt(v) << "\n";
      err << "wrote " << csv_path << "\n";
      if (a.svg) {
        const std::string svg_path = a.out_dir + "/" + name.str() + ".svg";
        std::ostringstream title;
        title << "ANPEC, " << to_string(d) << ", p=" << fmt(p)
              << ", mu2=" << fmt(mu2);
        write_svg(svg_path, title.str(), lambdas, curves, a.n_max);
        err << "wrote " << svg_path << "\n";
      }
    }
  }
  (void)out;
  return 0;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string discipline;
  int n = 0;
  double lambda = 0, p = 0;
  std::string dist1, dist2;
  double horizon = 2e6, warmup = 1e5;
  int reps = 20;
  uint64_t seed = 1;
  double ci = 0.99;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig cfg;
  cfg.params.n_processors = a.n;
  cfg.params.think_rate = a.lambda;
  cfg.params.resume_prob = a.p;
  cfg.params.blocking_service = parse_service_spec(a.dist1);
  cfg.params.writeback_service = parse_service_spec(a.dist2);
  cfg.discipline = parse_discipline(a.discipline);
  cfg.horizon = a.horizon;
  cfg.warmup = a.warmup;
  cfg.replications = a.reps;
  cfg.base_seed = a.seed;
  cfg.ci_level = a.ci;

  const SimAggregate agg = run_simulation(cfg);
  out << "metric,mean,ci_halfwidth,replications,ci_level,seed\n";
  auto emit = [&](const char* name, const MetricSummary& m) {
    out << name << ',' << fmt(m.mean) << ',' << fmt(m.ci_halfwidth) << ','
        << agg.replications << ',' << fmt(agg.ci_level) << ',' << a.seed
        << "\n";
  };
  emit("anbc", agg.anbc);
  emit("utilization", agg.utilization);
  emit("wait_blocking", agg.wait_blocking);
  emit("wait_writeback", agg.wait_writeback);
  emit("wait_overall", agg.wait_overall);
  return 0;
}

// ----------------------------------------------------------------- config

void apply_take_last(CLI::App* app) {
  for (auto* opt : app->get_options())
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

// Expands `--config FILE` (if present) into leading flag tokens so that
// explicit command-line flags win.
std::vector<std::string> expand_config(CLI::App* sub,
                                       std::vector<std::string> args) {
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw std::runtime_error("--config requires a file path");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
  }
  if (config_path.empty()) return args;
  std::vector<std::string> expanded;
  for (const auto& [key, value] : parse_config_file(config_path)) {
    const std::string flag = "--" + key;
    if (!sub->get_option_no_throw(flag))
      throw std::runtime_error("unknown config key '" + key + "'");
    expanded.push_back(flag);
    expanded.push_back(value);
  }
  expanded.insert(expanded.end(), args.begin(), args.end());
  return expanded;
}

} // namespace

ServiceSpec parse_service_spec(const std::string& text) {
  const auto fail = [&]() -> ServiceSpec {
    throw std::runtime_error(
        "malformed distribution '" + text +
        "' (expected exp:RATE, det:DURATION, erlang:SHAPE:RATE or "
        "hyper:W1,..,Wk:R1,..,Rk)");
  };
  const size_t colon = text.find(':');
  if (colon == std::string::npos) return fail();
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  try {
    if (kind == "exp") return Exponential{std::stod(rest)};
    if (kind == "det") return Deterministic{std::stod(rest)};
    if (kind == "erlang") {
      const size_t c2 = rest.find(':');
      if (c2 == std::string::npos) return fail();
      return Erlang{std::stoi(rest.substr(0, c2)), std::stod(rest.substr(c2 + 1))};
    }
    if (kind == "hyper") {
      const size_t c2 = rest.find(':');
      if (c2 == std::string::npos) return fail();
      return HyperExponential{parse_double_list(rest.substr(0, c2)),
                              parse_double_list(rest.substr(c2 + 1))};
    }
  } catch (const std::exception&) {
    return fail();
  }
  return fail();
}

std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config parse error at line " +
                               std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error("config parse error at line " +
                               std::to_string(lineno) + ": empty key or value");
    out.emplace_back(key, value);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"closed queueing-network models of a shared-bus multiprocessor"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve one analytic model instance");
  solve->add_option("--discipline", sa.discipline)->required();
  solve->add_option("--n", sa.n)->required();
  solve->add_option("--lambda", sa.lambda)->required();
  solve->add_option("--mu1", sa.mu1)->required();
  solve->add_option("--mu2", sa.mu2)->required();
  solve->add_option("--p", sa.p)->required();
  solve->add_option("--method", sa.method)
      ->check(CLI::IsMember({"auto", "direct", "iterative"}));

  ValidateArgs va;
  auto* validate = app.add_subcommand(
      "validate-tables", "recompute the embedded reference tables");
  validate->add_option("--tolerance", va.tolerance);
  validate->add_option("--pct-tolerance", va.pct_tolerance);

  FigureArgs fa;
  auto* figure = app.add_subcommand("figure-data", "emit ANPEC-vs-N curves");
  figure->add_option("--p-list", fa.p_list);
  figure->add_option("--mu2-list", fa.mu2_list);
  figure->add_option("--lambda-list", fa.lambda_list);
  figure->add_option("--n-max", fa.n_max);
  figure->add_option("--discipline", fa.discipline);
  figure->add_option("--mu1", fa.mu1);
  figure->add_option("--out-dir", fa.out_dir);
  figure->add_flag("--svg", fa.svg);

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "discrete-event simulation run");
  sim->add_option("--discipline", ma.discipline)->required();
  sim->add_option("--n", ma.n)->required();
  sim->add_option("--lambda", ma.lambda)->required();
  sim->add_option("--p", ma.p)->required();
  sim->add_option("--dist1", ma.dist1)->required();
  sim->add_option("--dist2", ma.dist2)->required();
  sim->add_option("--horizon", ma.horizon);
  sim->add_option("--warmup", ma.warmup);
  sim->add_option("--reps", ma.reps);
  sim->add_option("--seed", ma.seed);
  sim->add_option("--ci", ma.ci);

  for (auto* s : {solve, validate, figure, sim}) apply_take_last(s);

  // Resolve a config file before the real parse: find the subcommand name,
  // expand its --config into flags that precede the explicit ones.
  std::vector<std::string> argv = args;
  try {
    for (size_t i = 0; i < argv.size(); ++i) {
      CLI::App* sub = app.get_subcommand_no_throw(argv[i]);
      if (sub) {
        std::vector<std::string> rest(argv.begin() + static_cast<long>(i) + 1,
                                      argv.end());
        rest = expand_config(sub, std::move(rest));
        argv.resize(i + 1);
        argv.insert(argv.end(), rest.begin(), rest.end());
        break;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    std::vector<const char*> cargs;
    cargs.push_back("busq");
    for (const auto& a : argv) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(sa, out);
    if (validate->parsed()) return cmd_validate_tables(va, out, err);
    if (figure->parsed()) return cmd_figure_data(fa, out, err);
    if (sim->parsed()) return cmd_simulate(ma, out);
  } catch (const StateSpaceCapExceeded& e) {
    err << "error: " << e.what()
        << " (lower --n-max or use --discipline priority)\n";
    return 3;
  } catch (const CtmcError& e) {
    err << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

} // namespace busq
