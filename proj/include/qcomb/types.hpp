#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qcomb {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2cd;
using Index = Eigen::Index;

inline constexpr cplx I_UNIT{0.0, 1.0};

// Bad system labels: unknown, duplicated, colliding.
struct LabelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Shape / dimension mismatches.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameter outside its documented domain (gamma, n, degree, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A numerical invariant failed (non-unitary input, non-Hermitian operator,
// transcription error in a constant table, ...).
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double max_abs(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace qcomb
