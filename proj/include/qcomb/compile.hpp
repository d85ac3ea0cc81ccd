#pragma once

#include "qcomb/sdp.hpp"
#include "qcomb/strategies.hpp"
#include "qcomb/symmetry.hpp"

namespace qcomb {

// Equality system of a strategy class, lowered to SDP constraints.
struct CompiledSystem {
  SdpProblem problem;  // blocks and constraints; objective left at zero
  std::size_t raw_rows = 0;
  std::size_t rank = 0;
  int parameters = 0;  // real parameters before the equalities
  bool reduced = false;
};

// One 2^{2n+2} block "C". Every trace-and-replace map is diagonal on Pauli
// strings, so the constraints are "coefficient of string s vanishes" for
// each string some map does not annihilate, plus the trace row. Rows are
// orthogonal; no presolve needed. Symmetry maps are rejected.
CompiledSystem compile_full(const StrategyConstraintSet& s);

// Blocks H_k of the commutant parameterization; each map is pushed through
// the basis change and re-extracted, then redundant rows are dropped by QR.
CompiledSystem compile_reduced(const StrategyConstraintSet& s, const BlockStructure& bs,
                               double tol = 1e-10);

// Objective tr[C Omega] in either parameterization.
void set_objective(CompiledSystem& cs, const LabeledOperator& omega,
                   const BlockStructure* bs = nullptr);

// Reassemble C from a primal solution.
LabeledOperator strategy_from_solution(const CompiledSystem& cs, const SdpSolution& sol,
                                       int n_slots, const BlockStructure* bs = nullptr);

// sigma_s on the big-endian qubit string s (0=I, 1=X, 2=Y, 3=Z) as sparse entries.
std::vector<SparseEntry> pauli_string_entries(const std::vector<int>& s);

}  // namespace qcomb
