// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcomb/circuits.hpp"
#include "qcomb/theorems.hpp"
#include "support.hpp"

using namespace qcomb;
using namespace qtest;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream why;

  void check(bool cond, const std::string& msg) {
    if (!cond && ok) why << msg;
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(int k, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0) o.check(t < limit_s, "runtime " + std::to_string(t) + " s over the limit");
  std::printf("CRITERION %2d %s: %s (%.2f s)%s%s\n", k, title, o.ok ? "PASS" : "FAIL", t,
              o.ok ? "" : " ", o.why.str().c_str());
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
  return g;
}

const std::vector<double> kNine{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

// Kraus set of a random channel din -> dout.
std::vector<CMat> random_kraus(std::mt19937_64& rng, Index din, Index dout, int env) {
  CMat v = random_complex(rng, env * dout, din);
  Eigen::HouseholderQR<CMat> qr(v);
  CMat iso = qr.householderQ() * CMat::Identity(env * dout, din);
  std::vector<CMat> ks;
  for (int e = 0; e < env; ++e) ks.push_back(iso.middleRows(e * dout, dout));
  return ks;
}

LabeledOperator kraus_choi(const std::vector<CMat>& ks, const std::string& out, const std::string& in) {
  const Index dout = ks[0].rows(), din = ks[0].cols();
  CMat j = CMat::Zero(dout * din, dout * din);
  for (const auto& k : ks) {
    CVec v = choi_vector(k);
    j += v * v.adjoint();
  }
  return {{{out, int(dout)}, {in, int(din)}}, j};
}

}  // namespace

int main() {
  criterion(1, "baseline identity", 1.0, [](Outcome& o) {
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (int i = 0; i < 25; ++i) {
      CMat u = haar_unitary(rng);
      for (double g : kNine)
        worst = std::max(worst, std::abs(channel_fidelity(noisy_unitary_choi(u, NoiseModel(g)), u) -
                                         (1 - 0.75 * g)));
    }
    o.check(worst < 1e-12, "max deviation " + fmt(worst));
  });

  criterion(2, "two-slot ICO no-go", 120.0, [](Outcome& o) {
    SdpOptions opt;
    opt.tol = 1e-9;
    for (double g : kNine) {
      auto r = verify_nogo(g, 1e-6, opt);
      o.check(r.full_status == SdpStatus::optimal, "full SDP not optimal at " + fmt(g));
      o.check(std::abs(r.full_ico_optimum - (1 - 0.75 * g)) < 1e-6,
              "full optimum off at " + fmt(g) + ": " + fmt(r.full_ico_optimum));
      double lo = 1e300, hi = -1e300;
      for (const auto& s : r.chain) {
        lo = std::min(lo, s.value);
        hi = std::max(hi, s.value);
        o.check(s.status == SdpStatus::optimal, "stage " + s.stage + " not optimal at " + fmt(g));
      }
      o.check(hi - lo < 1e-6, "chain spread " + fmt(hi - lo) + " at " + fmt(g));
      Eigen::Vector2d v = r.m_eigenvector;
      if (v(0) < 0) v = -v;
      o.check(std::abs(r.m_eigenvalue - 5 * (1 - g)) < 1e-10, "M eigenvalue off at " + fmt(g));
      o.check((v - Eigen::Vector2d(0.5, std::sqrt(3.0) / 2)).cwiseAbs().maxCoeff() < 1e-10,
              "M eigenvector off at " + fmt(g));
    }
  });

  criterion(3, "three-slot optimum", 120.0, [](Outcome& o) {
    SdpOptions opt;
    opt.tol = 1e-9;
    for (double g : kNine) {
      auto r = verify_3slot(g, 1e-6, 10, 7, opt);
      o.check(r.primal_status == SdpStatus::optimal && r.dual_status == SdpStatus::optimal,
              "solver status at " + fmt(g));
      o.check(std::abs(r.reduced_primal - r.formula) < 1e-6, "primal off at " + fmt(g));
      o.check(std::abs(r.dual_value - r.formula) < 1e-6, "dual off at " + fmt(g));
      o.check(std::abs(r.reduced_primal - r.dual_value) < 1e-6, "primal/dual gap at " + fmt(g));
    }
    o.check(optimal_fidelity_3slot(0.0) == 1.0, "formula(0) != 1");
    o.check(std::abs(optimal_fidelity_3slot(1.0) - 0.25) < 1e-12, "formula(1) != 1/4");
  });

  criterion(4, "circuit achieves the optimum", 60.0, [](Outcome& o) {
    std::mt19937_64 rng(99);
    for (int i = 0; i <= 10; ++i) {
      const double g = i / 10.0;
      const double target = optimal_fidelity_3slot(g);
      std::vector<double> fs;
      double worst = 0;
      for (int t = 0; t < 100; ++t) {
        CMat u = haar_unitary(rng);
        fs.push_back(channel_fidelity(run_protocol(u, g), u));
        worst = std::max(worst, std::abs(fs.back() - target));
      }
      // two-pass; E[f^2] - E[f]^2 cancels down to ~1e-15 on its own
      double mean = 0, var = 0;
      for (double f : fs) mean += f;
      mean /= fs.size();
      for (double f : fs) var += (f - mean) * (f - mean);
      var /= fs.size();
      o.check(worst < 1e-9, "deviation " + fmt(worst) + " at " + fmt(g));
      o.check(var < 1e-16, "variance " + fmt(var) + " at " + fmt(g));
    }
  });

  criterion(5, "strict improvement", 0, [](Outcome& o) {
    double lowest = 1e300;
    for (double g : grid(0.05, 0.95, 200))
      lowest = std::min(lowest, optimal_fidelity_3slot(g) - baseline_fidelity(g));
    o.check(lowest > 1e-4, "min delta " + fmt(lowest));
    o.check(std::abs(optimal_fidelity_3slot(0.0) - baseline_fidelity(0.0)) < 1e-12, "delta(0)");
    o.check(std::abs(optimal_fidelity_3slot(1.0) - baseline_fidelity(1.0)) < 1e-12, "delta(1)");
  });

  criterion(6, "dual certificate polynomials", 0, [](Outcome& o) {
    double worst = 0;
    for (double g : grid(0.0, 1.0, 50))
      worst = std::max(worst, std::abs(dual_certificate_values(g).objective - optimal_fidelity_3slot(g)));
    o.check(worst < 1e-12, "objective vs formula " + fmt(worst));
    double lowest = 1e300;
    for (int i = 1; i < 1000; ++i) {
      auto d = dual_certificate_values(i / 1000.0);
      for (double e : d.eig0) lowest = std::min(lowest, e);
      for (double e : d.eig1) lowest = std::min(lowest, e);
    }
    o.check(lowest >= -1e-12, "eigenvalue polynomial " + fmt(lowest));
  });

  criterion(7, "constants integrity", 0, [](Outcome& o) {
    const auto& c = load_constants();
    for (const char* n : {"V1", "V2", "V3", "V4", "U4", "U41", "U42", "U43"}) {
      const CMat& m = c.at(n).matrix;
      double r = max_abs(m.adjoint() * m - CMat::Identity(m.cols(), m.cols()));
      if (m.rows() == m.cols()) r = std::max(r, max_abs(m * m.adjoint() - CMat::Identity(m.rows(), m.rows())));
      o.check(r < 1e-12, std::string(n) + " residual " + fmt(r));
    }
    CMat bd = CMat::Zero(20, 20);
    bd.block(0, 0, 8, 8) = c.at("U41").matrix;
    bd.block(8, 8, 8, 8) = c.at("U42").matrix;
    bd.block(16, 16, 4, 4) = c.at("U43").matrix;
    const auto d = block_diag({c.at("U41").exact, c.at("U42").exact, c.at("U43").exact});
    const auto found = find_block_permutation(c.at("U4").exact, d);
    o.check(found.has_value(), "no block permutation found");
    if (found) {
      bool exact = true;
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
          exact = exact && c.at("U4").matrix(found->rows[i], found->cols[j]) == bd(i, j);
      o.check(exact, "permuted U4 differs from the block diagonal");
    }
  });

  criterion(8, "symmetry machinery", 0, [](Outcome& o) {
    std::mt19937_64 rng(808);
    for (int n : {2, 3}) {
      auto om = performance_operator(NoiseModel(0.37), n, Averaging::haar());
      double worst = 0;
      for (int t = 0; t < 20; ++t) {
        CMat r = group_action(haar_unitary(rng), haar_unitary(rng), n);
        worst = std::max(worst, max_abs(r * om.op.matrix() - om.op.matrix() * r));
      }
      o.check(worst < 1e-10, "commutator " + fmt(worst) + " for n=" + std::to_string(n));
      auto c = random_op(rng, strategy_names(n), std::vector<int>(2 * n + 2, 2));
      auto t1 = twirl(c, block_structure(n));
      const double idem = distance(t1, twirl(t1, block_structure(n)));
      o.check(idem < 1e-12, "twirl idempotence " + fmt(idem));
    }
    const auto& bs = block_structure(2);
    for (double g : {0.2, 0.5, 0.8}) {
      const double a = 1 - g;
      auto bt = block_trace(performance_operator(NoiseModel(g), 2, Averaging::haar(),
                                                 Objective::nogo_offset).op.matrix(),
                            bs);
      CMat o00 = CMat::Zero(4, 4);
      o00(0, 0) = -a * (3 * a * a + 1) / 6;
      o00(0, 1) = o00(1, 0) = -a * (2 - g);
      o00(1, 1) = -1.5 * a * (3 * a * a + 1);
      o00(2, 2) = o00(3, 3) = -1.5 * g * g * g + 4.5 * g * g - 3 * g;
      o00(2, 3) = o00(3, 2) = a * g;
      CMat o11 = CMat::Zero(2, 2);
      o11(0, 0) = -a * (3 * a * a + 13) / 3;
      o11(1, 1) = -3 * a * (1 - a * a);
      const double o33 = -2.0 / 3 * a * (3 * a * a + 7);
      double err = std::max({max_abs(bt[0] - o00), max_abs(bt[1] - o11), max_abs(bt[2] - o11),
                             std::abs(bt[3](0, 0) - o33)});
      o.check(err < 1e-10, "printed blocks off by " + fmt(err) + " at " + fmt(g));
    }
  });

  criterion(9, "gate-set causal-order experiment", 900.0, [](Outcome& o) {
    std::vector<double> gs;
    for (int i = 0; i <= 20; ++i) gs.push_back(i * 0.05);
    SdpOptions opt;
    opt.tol = 1e-8;
    auto rows = gate_set_experiment(gs, default_gate_set(),
                                    {StrategyKind::parallel, StrategyKind::sequential, StrategyKind::ico},
                                    opt);
    for (const auto& r : rows) {
      for (auto s : r.status) o.check(s == SdpStatus::optimal, "solver status at " + fmt(r.gamma));
      const auto& v = r.values;
      o.check(v[0] <= v[1] + 1e-6 && v[1] <= v[2] + 1e-6,
              "ordering at " + fmt(r.gamma) + ": " + fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]));
      for (double x : v)
        o.check(x >= 1 - 0.75 * r.gamma - 1e-6 && x <= 1 + 1e-6, "bound at " + fmt(r.gamma));
      if (r.gamma == 0.0)
        for (double x : v) o.check(std::abs(x - 1) < 1e-6, "gamma = 0 not perfect");
      std::printf("    gamma %.2f  parallel %.9f  sequential %.9f  ico %.9f  baseline %.9f\n", r.gamma,
                  v[0], v[1], v[2], r.baseline);
    }
  });

  criterion(10, "algebra property suite", 30.0, [](Outcome& o) {
    std::mt19937_64 rng(1010);
    std::uniform_int_distribution<int> dim(2, 3), env(1, 3);
    double link = 0, ptr = 0, tnr = 0;
    for (int t = 0; t < 1000; ++t) {
      // composition law: J^{B o A} = J^B * J^A
      const int di = dim(rng), dm = dim(rng), dout = dim(rng);
      auto ka = random_kraus(rng, di, dm, env(rng));
      auto kb = random_kraus(rng, dm, dout, env(rng));
      std::vector<CMat> kab;
      for (const auto& b : kb)
        for (const auto& a : ka) kab.push_back(b * a);
      auto lp = link_product(kraus_choi(ka, "M", "I"), kraus_choi(kb, "O", "M"));
      link = std::max(link, distance(kraus_choi(kab, "O", "I"), lp));

      // partial-trace factorization: tr_B(X_A (x) Y_B) = tr(Y) X_A, and
      // tr_{BC} = tr_C tr_B
      auto x = random_op(rng, {"A"}, {dim(rng)});
      auto y = random_op(rng, {"B", "C"}, {dim(rng), dim(rng)});
      auto xy = tensor(x, y);
      ptr = std::max(ptr, distance(partial_trace(xy, {"B", "C"}), y.trace() * x));
      ptr = std::max(ptr, distance(partial_trace(partial_trace(xy, {"B"}), {"C"}),
                                   partial_trace(xy, {"C", "B"})));

      // trace-and-replace idempotence
      auto z = random_op(rng, {"P", "Q", "R"}, {2, dim(rng), 2});
      std::vector<std::string> over = t % 2 ? std::vector<std::string>{"Q"}
                                            : std::vector<std::string>{"R", "P"};
      auto once = trace_and_replace(z, over);
      tnr = std::max(tnr, distance(once, trace_and_replace(once, over)));
    }
    o.check(link < 1e-10, "composition law " + fmt(link));
    o.check(ptr < 1e-10, "partial-trace factorization " + fmt(ptr));
    o.check(tnr < 1e-10, "trace-and-replace idempotence " + fmt(tnr));
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
