#pragma once

#include <string>
#include <vector>

#include "qcomb/tensor.hpp"

namespace qcomb {

enum class StrategyKind { parallel, sequential, ico };
std::string to_string(StrategyKind k);
StrategyKind parse_strategy_kind(const std::string& s);

struct TraceReplaceTerm {
  double coeff;
  std::vector<std::string> systems;
};

// A linear map L with the constraint L(C) = 0. Two shapes occur: a signed
// sum of trace-and-replace operations, or C - P C P^dagger for a system
// permutation P (slot symmetry).
class EqualityMap {
 public:
  static EqualityMap trace_replace(std::string name, std::vector<TraceReplaceTerm> terms);
  // order[k] = system whose content moves to position k, e.g. swapping slots
  // 1 and 2 maps (P,I1,O1,I2,O2,F) to (P,I2,O2,I1,O1,F).
  static EqualityMap symmetry(std::string name, std::vector<std::string> permuted_names);

  const std::string& name() const { return name_; }
  bool is_trace_replace() const { return permuted_.empty(); }
  const std::vector<TraceReplaceTerm>& terms() const { return terms_; }
  const std::vector<std::string>& permuted_names() const { return permuted_; }

  LabeledOperator apply(const LabeledOperator& c) const;
  // Adjoint w.r.t. the Hilbert-Schmidt product.
  LabeledOperator apply_adjoint(const LabeledOperator& c) const;
  // Eigenvalue of a trace-replace map on a Pauli string; `identity_on` flags
  // the systems (by name) where the string is the identity.
  double pauli_multiplier(const std::vector<std::string>& names,
                          const std::vector<bool>& identity_on) const;

 private:
  std::string name_;
  std::vector<TraceReplaceTerm> terms_;
  std::vector<std::string> permuted_;
};

struct StrategyConstraintSet {
  int n_slots = 0;
  StrategyKind kind = StrategyKind::sequential;
  std::vector<EqualityMap> equalities;
  double trace_value = 0.0;
  bool slot_symmetric = false;

  std::vector<std::string> systems() const { return strategy_names(n_slots); }
};

StrategyConstraintSet sequential_constraints(int n);
StrategyConstraintSet ico_constraints(int n);
StrategyConstraintSet parallel_constraints(int n);
StrategyConstraintSet constraints_for(StrategyKind kind, int n);
// Adds C = P_pi C P_pi^dagger for adjacent transpositions (generators of S_n).
StrategyConstraintSet with_slot_symmetry(StrategyConstraintSet s);

struct StrategyReport {
  std::vector<std::pair<std::string, double>> residuals;  // max-abs per map
  double max_residual = 0.0;
  double min_eigenvalue = 0.0;
  double trace_residual = 0.0;
  bool feasible = false;
};

StrategyReport check_strategy(const LabeledOperator& c, const StrategyConstraintSet& s,
                              double tol = 1e-9);

struct SlotPermutation {
  std::vector<int> pi;  // pi[k-1] = image of slot k, 1-based values
  CMat matrix;          // on P I1 O1 ... In On F
  std::vector<std::string> image_names;
};

// P_pi (A_{I1O1} (x) ... ) P_pi^dagger places slot k's content at slot pi(k).
SlotPermutation slot_permutation(const std::vector<int>& pi, int n);

// Identity wire P -> I1, O1 -> F; the remaining slots get a maximally mixed
// input and a discarded output. Valid for every kind.
LabeledOperator trivial_strategy(int n);

}  // namespace qcomb
