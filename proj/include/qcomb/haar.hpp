#pragma once

#include <functional>
#include <vector>

#include "qcomb/channels.hpp"
#include "qcomb/tensor.hpp"

namespace qcomb {

// Euler-angle product rule U = Rz(a) Ry(b) Rz(c). Exact for integrands that
// are polynomials of degree t in the entries of U and degree t in those of
// U*, with 2t <= degree.
struct QuadratureRule {
  std::vector<Mat2> nodes;
  std::vector<double> weights;
  int degree = 0;
};

inline constexpr int kMaxHaarDegree = 16;

QuadratureRule su2_quadrature(int degree);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w);

using HaarIntegrand = std::function<LabeledOperator(const Mat2&)>;
LabeledOperator su2_haar_moment(const HaarIntegrand& integrand, int degree,
                                bool parallel = true);

enum class Objective {
  fidelity,     // tr[C Omega] = average channel fidelity
  nogo_offset,  // |U>><<U| - (4 - 3 gamma)/2 on (P,F), no 1/d^2
};

struct Averaging {
  std::vector<Mat2> gates;  // empty means Haar

  bool is_haar() const { return gates.empty(); }
  static Averaging haar() { return {}; }
  static Averaging gate_set(std::vector<Mat2> g);
};

std::vector<Mat2> default_gate_set();  // X, Y, Z, I, H, S

struct PerformanceOperator {
  LabeledOperator op;  // on P I1 O1 ... In On F
  int n_slots = 0;
  double gamma = 0.0;
  Averaging averaging;
  Objective objective = Objective::fidelity;
};

PerformanceOperator performance_operator(const NoiseModel& noise, int n,
                                         const Averaging& averaging,
                                         Objective objective = Objective::fidelity,
                                         bool parallel = true);

// Single-U integrand of the performance operator (before averaging), in
// canonical system order.
LabeledOperator performance_integrand(const NoiseModel& noise, int n, const Mat2& u,
                                      Objective objective);

CMat kron(const CMat& a, const CMat& b);

}  // namespace qcomb
