#include "qcomb/haar.hpp"

#include <cmath>
#include <numbers>

#include "qcomb/kernels.hpp"

namespace qcomb {

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

namespace {

Mat2 rz(double t) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(-I_UNIT * (t / 2));
  m(1, 1) = std::exp(I_UNIT * (t / 2));
  return m;
}

Mat2 ry(double b) {
  Mat2 m;
  m << std::cos(b / 2), -std::sin(b / 2), std::sin(b / 2), std::cos(b / 2);
  return m;
}

}  // namespace

QuadratureRule su2_quadrature(int degree) {
  if (degree < 0 || degree > kMaxHaarDegree)
    throw DomainError("su2_quadrature: degree " + std::to_string(degree) +
                      " outside the configured range 0.." + std::to_string(kMaxHaarDegree));
  const int t = (degree + 1) / 2;
  const int na = t + 1;
  std::vector<double> xs, ws;
  gauss_legendre(t / 2 + 2, xs, ws);
  QuadratureRule q;
  q.degree = degree;
  for (int a = 0; a < na; ++a)
    for (int c = 0; c < na; ++c)
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double al = 2.0 * std::numbers::pi * a / na;
        const double ga = 2.0 * std::numbers::pi * c / na;
        q.nodes.push_back(rz(al) * ry(std::acos(xs[k])) * rz(ga));
        q.weights.push_back(ws[k] / 2.0 / na / na);
      }
  return q;
}

LabeledOperator su2_haar_moment(const HaarIntegrand& integrand, int degree, bool parallel) {
  auto q = su2_quadrature(degree);
  auto first = integrand(q.nodes.front());
  auto term = [&](std::size_t k) {
    auto v = integrand(q.nodes[k]);
    if (v.systems() != first.systems())
      throw LabelError("su2_haar_moment: integrand changed its system list");
    return v.matrix();
  };
  CMat sum = parallel ? kernels::weighted_sum_omp(q.nodes.size(), q.weights, term, first.dim(),
                                                  first.dim())
                      : kernels::weighted_sum_serial(q.nodes.size(), q.weights, term,
                                                     first.dim(), first.dim());
  return first.with_matrix(std::move(sum));
}

Averaging Averaging::gate_set(std::vector<Mat2> g) {
  if (g.empty()) throw DomainError("gate set must not be empty");
  for (const auto& u : g)
    if (!is_unitary(u)) throw InvariantError("gate set contains a non-unitary matrix");
  return Averaging{std::move(g)};
}

std::vector<Mat2> default_gate_set() {
  return {paulis::X(), paulis::Y(), paulis::Z(), paulis::I(), paulis::H(), paulis::S()};
}

namespace {

std::vector<std::string> raw_names(int n) {
  std::vector<std::string> out;
  for (int k = 1; k <= n; ++k) {
    out.push_back("I" + std::to_string(k));
    out.push_back("O" + std::to_string(k));
  }
  out.push_back("F");
  out.push_back("P");
  return out;
}

// Slot factors (J^{N o U})^T on (I_k, O_k), then the target on (F, P).
CMat raw_integrand(const NoiseModel& noise, int n, const Mat2& u, Objective objective) {
  // J on (O, I); its transpose read on (I, O) is J[(o',i'),(o,i)] at [(i,o),(i',o')].
  CMat j = noisy_unitary_choi(u, noise).op().matrix();
  CMat slot(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int o = 0; o < 2; ++o)
      for (int ip = 0; ip < 2; ++ip)
        for (int op = 0; op < 2; ++op) slot(i * 2 + o, ip * 2 + op) = j(op * 2 + ip, o * 2 + i);
  CVec v = choi_vector(u);
  CMat target = v * v.adjoint();
  if (objective == Objective::nogo_offset)
    target -= (4.0 - 3.0 * noise.gamma()) / 2.0 * CMat::Identity(4, 4);
  CMat out = CMat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, slot);
  out = kron(out, target);
  if (objective == Objective::fidelity) out /= 4.0;
  return out;
}

void require_n(int n) {
  if (n < 1 || n > 3) throw DomainError("performance_operator supports n in {1, 2, 3}");
}

}  // namespace

LabeledOperator performance_integrand(const NoiseModel& noise, int n, const Mat2& u,
                                      Objective objective) {
  require_n(n);
  LabeledOperator raw(qubits(raw_names(n)), raw_integrand(noise, n, u, objective));
  return permute_systems(raw, strategy_names(n));
}

PerformanceOperator performance_operator(const NoiseModel& noise, int n,
                                         const Averaging& averaging, Objective objective,
                                         bool parallel) {
  require_n(n);
  const auto sys = qubits(raw_names(n));
  LabeledOperator raw;
  if (averaging.is_haar()) {
    // degree n+1 in U and in U*
    raw = su2_haar_moment(
        [&](const Mat2& u) { return LabeledOperator(sys, raw_integrand(noise, n, u, objective)); },
        2 * (n + 1), parallel);
  } else {
    const auto& g = averaging.gates;
    std::vector<double> w(g.size(), 1.0 / g.size());
    auto term = [&](std::size_t k) { return raw_integrand(noise, n, g[k], objective); };
    const Index d = Index(1) << (2 * n + 2);
    raw = LabeledOperator(sys, parallel ? kernels::weighted_sum_omp(g.size(), w, term, d, d)
                                        : kernels::weighted_sum_serial(g.size(), w, term, d, d));
  }
  PerformanceOperator p;
  p.op = permute_systems(raw, strategy_names(n));
  p.n_slots = n;
  p.gamma = noise.gamma();
  p.averaging = averaging;
  p.objective = objective;
  return p;
}

}  // namespace qcomb
