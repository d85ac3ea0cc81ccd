#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcomb/circuits.hpp"
#include "qcomb/theorems.hpp"

using namespace qcomb;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kSolver = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

double round12(double x) { return std::stod(num(x)); }

std::vector<double> parse_range(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("bad --gamma-range '" + s + "'");
    }
    if (used != tok.size()) throw UsageError("bad --gamma-range '" + s + "'");
    parts.push_back(v);
  }
  if (parts.size() != 3) throw UsageError("--gamma-range wants start:stop:step");
  const double a = parts[0], b = parts[1], st = parts[2];
  if (!(st > 0)) throw UsageError("--gamma-range step must be positive");
  if (b < a) throw UsageError("--gamma-range stop is below start");
  const long n = static_cast<long>(std::floor((b - a) / st + 1e-9)) + 1;
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(round12(a + i * st));
  return out;
}

struct Config {
  double gamma = -1;
  std::string range;
  double tol = 1e-6;
  int samples = 100;
  std::uint64_t seed = 7;
  std::string out;
  std::string format = "csv";
};

std::vector<double> gammas(const Config& c, const std::string& fallback) {
  if (c.gamma >= 0 && !c.range.empty()) throw UsageError("give --gamma or --gamma-range, not both");
  std::vector<double> g = c.gamma >= 0 ? std::vector<double>{c.gamma}
                                       : parse_range(c.range.empty() ? fallback : c.range);
  for (double x : g)
    if (x < 0 || x > 1) throw UsageError("gamma " + num(x) + " outside [0, 1]");
  return g;
}

// A record is an ordered list of (key, value) where value is a number or text.
struct Field {
  std::string key;
  bool numeric;
  double x;
  std::string s;
};
using Record = std::vector<Field>;

Field f(std::string k, double v) { return {std::move(k), true, v, {}}; }
Field f(std::string k, std::string v) { return {std::move(k), false, 0, std::move(v)}; }

void write(std::ostream& os, const std::string& format, const std::vector<Record>& rows) {
  if (format == "csv") {
    if (rows.empty()) return;
    for (std::size_t i = 0; i < rows[0].size(); ++i) os << (i ? "," : "") << rows[0][i].key;
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << (r[i].numeric ? num(r[i].x) : r[i].s);
      os << '\n';
    }
  } else if (format == "jsonl") {
    for (const auto& r : rows) {
      nlohmann::ordered_json j;
      for (const auto& fl : r) {
        if (fl.numeric) j[fl.key] = round12(fl.x);
        else j[fl.key] = fl.s;
      }
      os << j.dump() << '\n';
    }
  } else {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k) os << '\n';
      for (const auto& fl : rows[k]) os << fl.key << ": " << (fl.numeric ? num(fl.x) : fl.s) << '\n';
    }
  }
}

void emit(const Config& c, const std::vector<Record>& rows) {
  if (c.out.empty()) {
    write(std::cout, c.format, rows);
    return;
  }
  std::ofstream os(c.out);
  if (!os) throw UsageError("cannot write '" + c.out + "'");
  write(os, c.format, rows);
}

SdpOptions solver_options(const Config& c) {
  SdpOptions o;
  o.tol = std::min(1e-9, c.tol * 1e-2);
  o.parallel = false;  // the gamma loop is the parallel level
  return o;
}

int cmd_nogo(const Config& c) {
  const auto g = gammas(c, "0.1:0.9:0.1");
  for (double x : g)
    if (x <= 0 || x >= 1) throw UsageError("verify-nogo needs gamma in (0, 1)");
  (void)nogo_reduced_system();
  (void)full_system(StrategyKind::ico, 2);
  (void)block_structure(2);
  std::vector<NoGoReport> rep(g.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(g.size()); ++i) rep[i] = verify_nogo(g[i], c.tol, solver_options(c));
  std::vector<Record> rows;
  int code = kPass;
  for (const auto& r : rep) {
    Record rec{f("gamma", r.gamma), f("baseline", r.baseline), f("full_ico", r.full_ico_optimum)};
    for (const auto& s : r.chain) rec.push_back(f("stage_" + s.stage, s.value));
    rec.push_back(f("m_eigenvalue", r.m_eigenvalue));
    rec.push_back(f("m_vec0", r.m_eigenvector(0)));
    rec.push_back(f("m_vec1", r.m_eigenvector(1)));
    rec.push_back(f("improvement", r.improvement));
    rec.push_back(f("status", r.passed ? std::string("pass") : "fail: " + r.failure));
    rows.push_back(std::move(rec));
    if (!r.passed) {
      std::cerr << "gamma " << num(r.gamma) << ": " << r.failure << '\n';
      const bool solver = r.full_status != SdpStatus::optimal ||
                          std::any_of(r.chain.begin(), r.chain.end(),
                                      [](const StageResult& s) { return s.status != SdpStatus::optimal; });
      code = std::max(code, solver ? int(kSolver) : int(kFail));
    }
  }
  emit(c, rows);
  return code;
}

int cmd_3slot(const Config& c) {
  const auto g = gammas(c, "0.1:0.9:0.1");
  if (c.samples < 1) throw UsageError("--samples must be positive");
  (void)three_slot_reduced_system();
  (void)load_constants();
  std::vector<ThreeSlotReport> rep(g.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(g.size()); ++i)
    rep[i] = verify_3slot(g[i], c.tol, c.samples, c.seed + static_cast<std::uint64_t>(i), solver_options(c));
  std::vector<Record> rows;
  int code = kPass;
  for (const auto& r : rep) {
    rows.push_back({f("gamma", r.gamma), f("primal", r.reduced_primal), f("dual", r.dual_value),
                    f("formula", r.formula), f("circuit", r.circuit_fidelity), f("baseline", r.baseline),
                    f("delta", r.delta)});
    if (c.format != "csv") {
      rows.back().push_back(f("certificate", r.certificate));
      rows.back().push_back(f("circuit_variance", r.circuit_variance));
      rows.back().push_back(f("status", r.passed ? std::string("pass") : "fail: " + r.failure));
    }
    if (!r.passed) {
      std::cerr << "gamma " << num(r.gamma) << ": " << r.failure << '\n';
      const bool solver = r.primal_status != SdpStatus::optimal || r.dual_status != SdpStatus::optimal;
      code = std::max(code, solver ? int(kSolver) : int(kFail));
    }
  }
  emit(c, rows);
  return code;
}

int cmd_experiment(const Config& c) {
  const auto g = gammas(c, "0:1:0.05");
  const std::vector<StrategyKind> kinds{StrategyKind::parallel, StrategyKind::sequential,
                                        StrategyKind::ico};
  const auto table = gate_set_experiment(g, default_gate_set(), kinds, solver_options(c));
  std::vector<Record> rows;
  int code = kPass;
  for (const auto& r : table) {
    Record rec{f("gamma", r.gamma)};
    bool solver_ok = true;
    for (std::size_t k = 0; k < r.kinds.size(); ++k) {
      rec.push_back(f(to_string(r.kinds[k]), r.values[k]));
      solver_ok = solver_ok && r.status[k] == SdpStatus::optimal;
    }
    rec.push_back(f("baseline", r.baseline));
    rows.push_back(std::move(rec));
    const double slack = c.tol;
    bool ok = r.values[0] <= r.values[1] + slack && r.values[1] <= r.values[2] + slack;
    for (double v : r.values) ok = ok && v >= r.baseline - slack && v <= 1 + slack;
    if (!solver_ok) {
      std::cerr << "gamma " << num(r.gamma) << ": solver failure\n";
      code = std::max(code, int(kSolver));
    } else if (!ok) {
      std::cerr << "gamma " << num(r.gamma) << ": ordering or bound violated\n";
      code = std::max(code, int(kFail));
    }
  }
  emit(c, rows);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("QCOMB_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  CLI::App app{"Strategy-level verification of unitary purification under depolarizing noise"};
  app.require_subcommand(1);
  Config cfg;
  auto common = [&](CLI::App* s, bool sampled) {
    s->add_option("--gamma", cfg.gamma, "single noise level");
    s->add_option("--gamma-range", cfg.range, "start:stop:step (inclusive)");
    s->add_option("--tol", cfg.tol, "agreement tolerance")->check(CLI::PositiveNumber);
    s->add_option("--out", cfg.out, "output file (default stdout)");
    s->add_option("--format", cfg.format, "csv | jsonl | text")
        ->check(CLI::IsMember({"csv", "jsonl", "text"}));
    if (sampled) {
      s->add_option("--samples", cfg.samples, "Haar-random unitaries per gamma");
      s->add_option("--seed", cfg.seed, "RNG seed");
    }
  };
  auto* nogo = app.add_subcommand("verify-nogo", "two-slot ICO no-go and the reduction chain");
  auto* three = app.add_subcommand("verify-3slot", "three-slot optimum, dual and circuit");
  auto* exp = app.add_subcommand("experiment-causal-order", "gate-set parallel / sequential / ICO table");
  auto* cst = app.add_subcommand("export-constants", "print the circuit tables");
  common(nogo, false);
  common(three, true);
  common(exp, false);
  cst->add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    if (*nogo) return cmd_nogo(cfg);
    if (*three) return cmd_3slot(cfg);
    if (*exp) return cmd_experiment(cfg);
    if (*cst) {
      if (cfg.out.empty()) export_constants(std::cout);
      else {
        std::ofstream os(cfg.out);
        if (!os) throw UsageError("cannot write '" + cfg.out + "'");
        export_constants(os);
      }
      return kPass;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kUsage;
}
