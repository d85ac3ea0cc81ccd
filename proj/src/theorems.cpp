#include "qcomb/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qcomb/circuits.hpp"

namespace qcomb {

double baseline_fidelity(double gamma) { return 1.0 - 0.75 * gamma; }

double optimal_fidelity_3slot(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
  const double r2 = std::sqrt(2.0);
  return (2.0 - gamma) * (12.0 + (8.0 * r2 - 9.0) * gamma + (3.0 - 8.0 * r2) * gamma * gamma) /
         24.0;
}

Eigen::Matrix2d nogo_matrix(double gamma) {
  const double q = 1.0 - gamma, r3 = std::sqrt(3.0);
  Eigen::Matrix2d m;
  m << -q, 2 * r3 * q, 2 * r3 * q, 3 * q;
  return m;
}

const CompiledSystem& nogo_reduced_system() {
  static const CompiledSystem cs = compile_reduced(ico_constraints(2), block_structure(2));
  return cs;
}

const CompiledSystem& three_slot_reduced_system() {
  static const CompiledSystem cs =
      compile_reduced(with_slot_symmetry(sequential_constraints(3)), block_structure(3));
  return cs;
}

const CompiledSystem& full_system(StrategyKind kind, int n) {
  if (n != 1 && n != 2) throw DomainError("full_system: only n = 1, 2 are solved in full");
  static const std::array<std::array<CompiledSystem, 3>, 2> cache = [] {
    std::array<std::array<CompiledSystem, 3>, 2> c;
    for (int nn = 1; nn <= 2; ++nn)
      for (int k = 0; k < 3; ++k)
        c[nn - 1][k] = compile_full(constraints_for(static_cast<StrategyKind>(k), nn));
    return c;
  }();
  return cache[n - 1][static_cast<int>(kind)];
}

namespace {

constexpr double kStageAgree = 1e-6;

// Fixed-block helpers for the hand-reduced programs.
void eq(SdpProblem& p, std::vector<BlockTerm> terms, double rhs, std::string tag) {
  p.constraints.push_back({std::move(terms), rhs, std::move(tag)});
}

StageResult run_stage(const std::string& name, const SdpProblem& p, const SdpOptions& opt,
                      SdpSolution* keep = nullptr) {
  auto sol = solve(p, opt);
  StageResult r{name, sol.primal_value, sol.status, sol.gap};
  if (keep) *keep = std::move(sol);
  return r;
}

// max tr[[H000 H001][. H011] M0] + tr[[H022 H023][. H033] M1] - q(4 H200 + 5)/2
// over H0 >= 0 and the slot relations.
SdpProblem stage_7plus(double g) {
  const double q = 1 - g;
  SdpProblem p;
  const int h0 = p.add_block("H0", 4), a = p.add_block("H1", 2), b = p.add_block("H2", 2),
            h3 = p.add_block("h3", 1);
  CMat& o = p.objective[h0];
  o(0, 0) = 2 * q;
  o(0, 1) = o(1, 0) = -q * (2 - g);
  o(1, 1) = -q;
  o(2, 3) = o(3, 2) = q * g;
  o(3, 3) = -3 * q;
  p.objective[b](0, 0) = -2 * q;
  p.constant = -2.5 * q;
  eq(p, {diag_term(a, 0, 1), diag_term(h0, 3, -1.5), diag_term(h0, 0, 0.5)}, 0, "H100");
  eq(p, {re_term(a, 0, 1, 1), re_term(h0, 1, 3, -1.5), re_term(h0, 0, 2, 0.5)}, 0, "Re H101");
  eq(p, {im_term(a, 0, 1, 1), im_term(h0, 1, 3, 1.5), im_term(h0, 0, 2, 0.5)}, 0, "Im H101");
  eq(p, {diag_term(a, 1, 1), diag_term(h0, 1, -1.5), diag_term(h0, 2, 0.5)}, 0, "H111");
  eq(p, {diag_term(b, 1, 1), diag_term(h0, 1, 0.5), diag_term(h0, 3, 0.5)}, 0.25, "H211");
  eq(p, {diag_term(h3, 0, 1), diag_term(h0, 1, 0.75), diag_term(h0, 3, 0.75), diag_term(b, 0, 0.5)},
     0.375, "h3");
  return p;
}

// Two 2x2 blocks plus scalar slacks; with_h200 keeps the H200 variable.
SdpProblem stage_7(double g, bool with_h200) {
  const double q = 1 - g;
  SdpProblem p;
  const int p1 = p.add_block("P1", 2), p2 = p.add_block("P2", 2);
  p.objective[p1] << 2 * q, -q * (2 - g), -q * (2 - g), -q;
  p.objective[p2] << 0, q * g, q * g, -3 * q;
  p.constant = -2.5 * q;
  const int s1 = p.add_block("3H033-H000", 1), s2 = p.add_block("3H011-H022", 1),
            s4 = p.add_block("1-2H011-2H033", 1), s5 = p.add_block("3-6H011-6H033-4H200", 1);
  eq(p, {diag_term(s1, 0, 1), diag_term(p2, 1, -3), diag_term(p1, 0, 1)}, 0, "s1");
  eq(p, {diag_term(s2, 0, 1), diag_term(p1, 1, -3), diag_term(p2, 0, 1)}, 0, "s2");
  eq(p, {diag_term(s4, 0, 1), diag_term(p1, 1, 2), diag_term(p2, 1, 2)}, 1, "s4");
  std::vector<BlockTerm> t5{diag_term(s5, 0, 1), diag_term(p1, 1, 6), diag_term(p2, 1, 6)};
  if (with_h200) {
    const int s3 = p.add_block("H200", 1);
    p.objective[s3](0, 0) = -2 * q;
    t5.push_back(diag_term(s3, 0, 4));
  }
  eq(p, std::move(t5), 3, "s5");
  return p;
}

// Lift of the rank-one stage: S1 ~ (u, v)(u, v)^T, S2 ~ (w, x)(w, x)^T with
// u = sqrt H000, v = sqrt H011, w = sqrt H022, x = sqrt H033.
SdpProblem stage_4_lift(double g) {
  const double q = 1 - g;
  SdpProblem p;
  const int a = p.add_block("S1", 2), b = p.add_block("S2", 2);
  p.objective[a] << 2 * q, q * (2 - g), q * (2 - g), -q;
  p.objective[b] << 0, q * g, q * g, -3 * q;
  p.constant = -2.5 * q;
  const int t1 = p.add_block("t1", 1), t2 = p.add_block("t2", 1), t3 = p.add_block("t3", 1);
  eq(p, {diag_term(t1, 0, 1), diag_term(b, 1, -3), diag_term(a, 0, 1)}, 0, "3x^2-u^2");
  eq(p, {diag_term(t2, 0, 1), diag_term(a, 1, -3), diag_term(b, 0, 1)}, 0, "3v^2-w^2");
  eq(p, {diag_term(t3, 0, 1), diag_term(a, 1, 2), diag_term(b, 1, 2)}, 1, "1-2v^2-2x^2");
  return p;
}

double stage_4_value(double g, double u, double v, double w, double x) {
  const double q = 1 - g;
  return q * (2 * u * u + 2 * (2 - g) * u * v - v * v + 2 * g * w * x - 3 * x * x) - 2.5 * q;
}

SdpProblem stage_2_lift(double g) {
  SdpProblem p;
  const int s = p.add_block("S", 2);
  const Eigen::Matrix2d m = nogo_matrix(g);
  p.objective[s] = m.cast<cplx>();
  p.constant = -2.5 * (1 - g);
  const int t = p.add_block("t", 1);
  eq(p, {diag_term(t, 0, 1), diag_term(s, 0, 2), diag_term(s, 1, 2)}, 1, "1-2H011-2H033");
  return p;
}

double sqrt_pos(double x) { return std::sqrt(std::max(0.0, x)); }

}  // namespace

NoGoReport verify_nogo(double gamma, double tol, const SdpOptions& opt) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("verify_nogo: gamma must lie in (0, 1)");
  NoGoReport r;
  r.gamma = gamma;
  r.baseline = baseline_fidelity(gamma);
  const NoiseModel noise(gamma);
  const double q = 1 - gamma;

  // (i) full space, fidelity objective
  {
    CompiledSystem cs = full_system(StrategyKind::ico, 2);
    set_objective(cs, performance_operator(noise, 2, Averaging::haar(), Objective::fidelity,
                                           opt.parallel).op);
    auto sol = solve(cs.problem, opt);
    r.full_ico_optimum = sol.primal_value;
    r.full_status = sol.status;
  }
  // (ii) reduced block SDP in offset units
  {
    CompiledSystem cs = nogo_reduced_system();
    const auto& bs = block_structure(2);
    set_objective(cs, performance_operator(noise, 2, Averaging::haar(), Objective::nogo_offset,
                                           opt.parallel).op, &bs);
    r.chain.push_back(run_stage("block", cs.problem, opt));
  }
  r.chain.push_back(run_stage("relations", stage_7plus(gamma), opt));
  r.chain.push_back(run_stage("zeroed", stage_7(gamma, true), opt));
  r.chain.push_back(run_stage("H200=0", stage_7(gamma, false), opt));
  {
    SdpSolution sol;
    auto st = run_stage("rank-one", stage_4_lift(gamma), opt, &sol);
    if (st.status == SdpStatus::optimal) {
      const auto& a = sol.primal[0];
      const auto& b = sol.primal[1];
      st.value = stage_4_value(gamma, sqrt_pos(a(0, 0).real()), sqrt_pos(a(1, 1).real()),
                               sqrt_pos(b(0, 0).real()), sqrt_pos(b(1, 1).real()));
    }
    r.chain.push_back(st);
  }
  {
    SdpSolution sol;
    auto st = run_stage("H000=3H033", stage_2_lift(gamma), opt, &sol);
    if (st.status == SdpStatus::optimal) {
      Eigen::Vector2d v(sqrt_pos(sol.primal[0](0, 0).real()), sqrt_pos(sol.primal[0](1, 1).real()));
      st.value = v.dot(nogo_matrix(gamma) * v) - 2.5 * q;
    }
    r.chain.push_back(st);
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(nogo_matrix(gamma));
    r.m_eigenvalue = es.eigenvalues()(1);
    r.m_eigenvector = es.eigenvectors().col(1);
    if (r.m_eigenvector(0) < 0) r.m_eigenvector = -r.m_eigenvector;
    r.optimal_point = r.m_eigenvector / std::sqrt(2.0);
    r.chain.push_back({"eigen", r.m_eigenvalue / 2 - 2.5 * q, SdpStatus::optimal, 0.0});
  }

  double lo = r.chain.front().value, hi = lo;
  for (const auto& s : r.chain) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
    if (s.status != SdpStatus::optimal && r.failure.empty())
      r.failure = "stage " + s.stage + ": " + to_string(s.status);
  }
  r.chain_spread = hi - lo;
  r.improvement = std::max(r.full_ico_optimum - r.baseline, hi / 4);
  if (r.full_status != SdpStatus::optimal && r.failure.empty())
    r.failure = "full: " + to_string(r.full_status);
  if (r.failure.empty()) {
    if (std::abs(r.full_ico_optimum - r.baseline) > tol)
      r.failure = "full ICO optimum differs from the baseline";
    else if (r.chain_spread > std::max(tol, kStageAgree))
      r.failure = "reduction stages disagree";
    else if (r.improvement > tol)
      r.failure = "improvement over the baseline";
    else if (std::abs(r.m_eigenvalue - 5 * q) > 1e-10 ||
             (r.m_eigenvector - Eigen::Vector2d(0.5, std::sqrt(3.0) / 2)).cwiseAbs().maxCoeff() >
                 1e-10)
      r.failure = "eigenpair of M";
  }
  r.passed = r.failure.empty();
  return r;
}

DualCertificate dual_certificate_values(double g) {
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);
  const double g2 = g * g, g3 = g2 * g;
  DualCertificate d;
  auto& y = d.y;
  y[1] = (8 * r2 - 25) / 128 * g3 + (105 - 24 * r2) / 128 * g2 + (8 * r2 - 73) / 64 * g + 9.0 / 16;
  y[2] = (4 * r2 + 5) / 64 * g3 - (6 * r2 + 9) / 32 * g2 + (r2 + 2) / 8 * g;
  y[4] = (8 * r2 - 7) / 128 * g3 + (27 - 24 * r2) / 128 * g2 + (8 * r2 - 19) / 64 * g + 3.0 / 16;
  y[6] = 3 * r3 / 128 * (3 * g3 - 13 * g2 + 18 * g - 8);
  y[7] = (8 * r2 + 29) / 128 * g3 - (24 * r2 + 75) / 128 * g2 + (8 * r2 + 35) / 64 * g - 3.0 / 16;
  y[8] = -(8 * r2 + 47) / 128 * g3 + (24 * r2 + 153) / 128 * g2 - (8 * r2 + 89) / 64 * g + 9.0 / 16;
  y[3] = y[1];
  y[5] = y[2];
  y[11] = y[6];
  y[9] = y[10] = -y[6];
  y[0] = -y[1] - 2 * y[2] + y[3] + y[4] + 2 * y[5];
  d.objective = 4.0 / 3 * y[3] + 4.0 / 3 * y[4] + 8.0 / 3 * y[5];

  d.eig0 = {g2 * (1 - g) / 16, g * (2 * r2 * g2 + 5 * g2 - 9 * g - 6 * r2 * g + 4 + 4 * r2) / 48, 0.0};
  d.eig1 = {-13 * g3 / 16 + 45 * g2 / 16 - 3.5 * g + 1.5, 3 * r2 * g * (g2 - 3 * g + 2) / 16, 0.0};

  d.y0 = CMat(4, 4);
  d.y0 << y[0], y[6], y[11], y[7],  //
      y[6], y[1], y[8], y[10],      //
      y[11], y[8], y[3], y[9],      //
      y[7], y[10], y[9], y[4];
  d.y0 /= 3.0;
  const double e = -(y[10] + y[11]) / 2;
  d.y1 = CMat(6, 6);
  d.y1 << y[0], y[6], 0, y[11], y[7], 0,  //
      y[6], y[1], 0, y[8], y[10], 0,      //
      0, 0, y[2], 0, 0, e,                //
      y[11], y[8], 0, y[3], y[9], 0,      //
      y[7], y[10], 0, y[9], y[4], 0,      //
      0, 0, e, 0, 0, y[5];
  return d;
}

ThreeSlotReport verify_3slot(double gamma, double tol, int samples, std::uint64_t seed,
                             const SdpOptions& opt) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("verify_3slot: gamma must lie in [0, 1]");
  if (samples < 1) throw DomainError("verify_3slot: need at least one sample");
  ThreeSlotReport r;
  r.gamma = gamma;
  r.baseline = baseline_fidelity(gamma);
  r.formula = optimal_fidelity_3slot(gamma);
  r.delta = r.formula - r.baseline;
  r.certificate = dual_certificate_values(gamma).objective;

  const auto& bs = block_structure(3);
  CompiledSystem cs = three_slot_reduced_system();
  set_objective(cs, performance_operator(NoiseModel(gamma), 3, Averaging::haar(),
                                         Objective::fidelity, opt.parallel).op, &bs);
  const auto primal = solve(cs.problem, opt);
  r.reduced_primal = primal.primal_value;
  r.primal_status = primal.status;

  const auto dual = explicit_dual(cs.problem);
  const auto dsol = solve(dual.problem, opt);
  r.dual_value = dual.offset - dsol.primal_value;
  r.dual_status = dsol.status;
  for (const auto& s : dsol.primal) r.dual_eigen_margins.push_back(check_psd(s, 0.0).min_eigenvalue);

  std::mt19937_64 rng(seed);
  std::vector<double> f;
  for (int i = 0; i < samples; ++i) {
    const CMat u = haar_unitary(rng, 2);
    f.push_back(channel_fidelity(run_protocol(u, gamma), u));
  }
  double mean = 0;
  for (double x : f) mean += x;
  mean /= f.size();
  double var = 0;
  for (double x : f) var += (x - mean) * (x - mean);
  r.circuit_fidelity = mean;
  r.circuit_variance = var / f.size();

  if (r.primal_status != SdpStatus::optimal) r.failure = "primal: " + to_string(r.primal_status);
  else if (r.dual_status != SdpStatus::optimal) r.failure = "dual: " + to_string(r.dual_status);
  else if (std::abs(r.reduced_primal - r.formula) > tol) r.failure = "primal differs from the formula";
  else if (std::abs(r.dual_value - r.formula) > tol) r.failure = "dual differs from the formula";
  else if (r.reduced_primal > r.dual_value + tol) r.failure = "primal exceeds dual";
  else if (std::abs(r.circuit_fidelity - r.formula) > 1e-9) r.failure = "circuit differs from the formula";
  else if (r.circuit_variance > 1e-16) r.failure = "circuit fidelity depends on U";
  else if (gamma > 0 && gamma < 1 && !(r.delta > 0)) r.failure = "no improvement over the baseline";
  else if (*std::min_element(r.dual_eigen_margins.begin(), r.dual_eigen_margins.end()) < -tol)
    r.failure = "dual slack not PSD";
  r.passed = r.failure.empty();
  return r;
}

std::vector<GateSetRow> gate_set_experiment(const std::vector<double>& gammas,
                                            const std::vector<Mat2>& gates,
                                            const std::vector<StrategyKind>& kinds,
                                            const SdpOptions& opt) {
  const auto avg = Averaging::gate_set(gates);
  for (auto k : kinds) (void)full_system(k, 2);  // build outside the parallel region
  std::vector<GateSetRow> rows(gammas.size());
  SdpOptions inner = opt;
  inner.parallel = false;
  inner.log = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(gammas.size()); ++i) {
    GateSetRow row;
    row.gamma = gammas[i];
    row.baseline = baseline_fidelity(gammas[i]);
    const auto omega =
        performance_operator(NoiseModel(gammas[i]), 2, avg, Objective::fidelity, false).op;
    for (auto k : kinds) {
      CompiledSystem cs = full_system(k, 2);
      set_objective(cs, omega);
      const auto sol = solve(cs.problem, inner);
      row.kinds.push_back(k);
      row.values.push_back(sol.primal_value);
      row.status.push_back(sol.status);
    }
    rows[i] = std::move(row);
  }
  return rows;
}

}  // namespace qcomb
