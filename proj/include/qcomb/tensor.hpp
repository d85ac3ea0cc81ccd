#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qcomb/types.hpp"

namespace qcomb {

struct SystemLabel {
  std::string name;
  int dim = 2;

  bool operator==(const SystemLabel&) const = default;
};

std::vector<SystemLabel> qubits(const std::vector<std::string>& names);

// Dense operator on an ordered list of named subsystems. Index layout is
// big-endian: the first listed system is the most significant digit.
class LabeledOperator {
 public:
  LabeledOperator() = default;
  LabeledOperator(std::vector<SystemLabel> systems, CMat matrix);

  static LabeledOperator identity(std::vector<SystemLabel> systems);
  static LabeledOperator scalar(cplx value);

  const std::vector<SystemLabel>& systems() const { return systems_; }
  const CMat& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

  std::vector<std::string> names() const;
  std::vector<int> dims() const;
  int position(std::string_view name) const;  // -1 when absent
  bool has(std::string_view name) const { return position(name) >= 0; }
  int dim_of(std::string_view name) const;
  cplx trace() const { return matrix_.trace(); }

  LabeledOperator with_matrix(CMat m) const { return {systems_, std::move(m)}; }
  LabeledOperator relabeled(const std::vector<std::pair<std::string, std::string>>& renames) const;
  LabeledOperator adjoint() const { return with_matrix(matrix_.adjoint()); }

 private:
  std::vector<SystemLabel> systems_;
  CMat matrix_;
};

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator permute_systems(const LabeledOperator& a,
                                const std::vector<std::string>& order);
LabeledOperator partial_trace(const LabeledOperator& a,
                              const std::vector<std::string>& over);
// X-C = I_X/d_X (x) tr_X C, with the system list left unchanged.
LabeledOperator trace_and_replace(const LabeledOperator& a,
                                  const std::vector<std::string>& x);
LabeledOperator partial_transpose(const LabeledOperator& a,
                                  const std::vector<std::string>& over);
// tr_S[(a^{T_S} (x) 1)(1 (x) b)] over the shared systems S. Result lists a's
// remaining systems, then b's.
LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b);

// Sum / difference on the same system set (b is reordered to match a).
LabeledOperator operator+(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator operator-(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator operator*(cplx s, const LabeledOperator& a);

// Canonical order P, I1, O1, ..., In, On, F, then ancillas A1.., then anything else.
std::vector<std::string> canonical_order(std::vector<std::string> names);
LabeledOperator to_canonical(const LabeledOperator& a);
// Names P, I1, O1, ..., In, On, F.
std::vector<std::string> strategy_names(int n);

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

bool is_hermitian(const CMat& m, double tol = 1e-12);
// Throws InvariantError on a non-Hermitian input.
PsdReport check_psd(const CMat& m, double tol = 1e-10);
PsdReport check_psd(const LabeledOperator& a, double tol = 1e-10);

// max |a - b| after aligning b's system order to a's.
double distance(const LabeledOperator& a, const LabeledOperator& b);

}  // namespace qcomb
