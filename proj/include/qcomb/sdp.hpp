#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qcomb/types.hpp"

namespace qcomb {

struct SparseEntry {
  int row = 0;
  int col = 0;
  cplx value;
};

// Part of a Hermitian constraint matrix living in one block; all nonzeros
// are listed (both triangles).
struct BlockTerm {
  int block = 0;
  std::vector<SparseEntry> entries;
};

// sum_b Re tr(A_b X_b) = rhs
struct LinearConstraint {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
  std::string tag;
};

// maximize sum_b Re tr(objective_b X_b) + constant
// subject to the linear constraints and X_b >= 0 (complex Hermitian blocks;
// scalar inequalities are 1x1 blocks).
struct SdpProblem {
  std::vector<std::string> block_names;
  std::vector<int> block_sizes;
  std::vector<CMat> objective;
  double constant = 0.0;
  std::vector<LinearConstraint> constraints;
  // Set by builders that know their rows are independent (skips presolve).
  bool rows_independent = false;

  int add_block(const std::string& name, int size);  // zero objective
  int block_index(const std::string& name) const;
  // Convenience: coefficient c on entry (i,j) and its mirror so the term
  // reads c*X_ij + conj(c)*X_ji ... see entry helpers below.
  std::size_t num_constraints() const { return constraints.size(); }
};

// Hermitian coefficient patterns for common scalar functionals.
// Re X_ii:
BlockTerm diag_term(int block, int i, double coeff);
// coeff * Re X_ij (i != j):
BlockTerm re_term(int block, int i, int j, double coeff);
// coeff * Im X_ij (i != j):
BlockTerm im_term(int block, int i, int j, double coeff);
BlockTerm dense_term(int block, const CMat& hermitian);

enum class SdpStatus { optimal, infeasible, unbounded, max_iterations, numerical_error };
std::string to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-9;
  int max_iterations = 150;
  bool parallel = true;
  bool presolve = true;
  std::ostream* log = nullptr;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_error;
  std::vector<CMat> primal;  // X_b
  RVec dual;                 // y, with S = sum_i y_i A_i - objective >= 0
  std::vector<CMat> slack;   // S_b
  double primal_value = 0.0;
  double dual_value = 0.0;   // b^T y + constant, an upper bound
  double gap = 0.0;          // dual_value - primal_value
  double primal_residual = 0.0;  // max |A(X) - b|
  double dual_residual = 0.0;    // max |A*(y) - objective - S|
  int iterations = 0;
  bool regularized = false;
  std::size_t kept_constraints = 0;
};

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {});

// Real vectorization of a Hermitian block: diagonal, then (Re, Im) of the
// strict upper triangle row by row. Inner products become
// Re tr(A X) = dot(coeff_vector(A), coord_vector(X)).
RVec coord_vector(const CMat& x);
RVec coeff_vector(const CMat& a);
CMat from_coeff_vector(const RVec& a, int n);
CMat from_coord_vector(const RVec& x, int n);

// Row-reduction of the constraint system (QR with column pivoting on the
// real-vectorized rows, relative tolerance `tol`). Throws InvariantError
// when a dropped row is inconsistent with the kept ones.
struct RowReduction {
  std::vector<std::size_t> kept;
  std::size_t rank = 0;
  double inconsistency = 0.0;
};
RowReduction reduce_rows(const SdpProblem& p, double tol = 1e-10);

// Dense constraint matrix A (rows = constraints) in coefficient coordinates.
RMat constraint_matrix(const SdpProblem& p);

// M_ij = sum_b Re tr(A_ib W_b A_jb W_b), the Newton system matrix.
RMat schur_complement_serial(const SdpProblem& p, const std::vector<CMat>& w);
RMat schur_complement_omp(const SdpProblem& p, const std::vector<CMat>& w);

// The dual  min b^T y  s.t.  sum_i y_i A_i - objective >= 0  recast as a
// standard-form problem in the slack S: with x0 any point satisfying the
// equalities, b^T y = <x0, S + objective>, and S + objective must lie in
// span{A_i}. Maximizing -<x0, S> gives  dual optimum = offset - value.
struct ExplicitDual {
  SdpProblem problem;
  double offset = 0.0;  // <x0, objective> + constant
};
ExplicitDual explicit_dual(const SdpProblem& p, double tol = 1e-10);

void dump_problem(std::ostream& os, const SdpProblem& p);
void dump_solution(std::ostream& os, const SdpSolution& s);

}  // namespace qcomb
