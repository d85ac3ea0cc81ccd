#include "qcomb/strategies.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <set>

#include "qcomb/kernels.hpp"

namespace qcomb {

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::parallel: return "parallel";
    case StrategyKind::sequential: return "sequential";
    case StrategyKind::ico: return "ico";
  }
  return "?";
}

StrategyKind parse_strategy_kind(const std::string& s) {
  if (s == "parallel") return StrategyKind::parallel;
  if (s == "sequential") return StrategyKind::sequential;
  if (s == "ico") return StrategyKind::ico;
  throw DomainError("unknown strategy kind '" + s + "'");
}

EqualityMap EqualityMap::trace_replace(std::string name, std::vector<TraceReplaceTerm> terms) {
  EqualityMap m;
  m.name_ = std::move(name);
  m.terms_ = std::move(terms);
  return m;
}

EqualityMap EqualityMap::symmetry(std::string name, std::vector<std::string> permuted_names) {
  if (permuted_names.empty()) throw DomainError("symmetry map needs a system order");
  EqualityMap m;
  m.name_ = std::move(name);
  m.permuted_ = std::move(permuted_names);
  return m;
}

namespace {

// Apply the system permutation and read the result back on the original names.
LabeledOperator conjugate_by(const LabeledOperator& c, const std::vector<std::string>& order) {
  auto moved = permute_systems(c, order);
  return c.with_matrix(moved.matrix());
}

std::vector<std::string> inverse_order(const std::vector<std::string>& names,
                                       const std::vector<std::string>& order) {
  std::vector<std::string> inv(names.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto it = std::find(names.begin(), names.end(), order[k]);
    if (it == names.end()) throw LabelError("symmetry map: unknown system '" + order[k] + "'");
    inv[it - names.begin()] = names[k];
  }
  return inv;
}

}  // namespace

LabeledOperator EqualityMap::apply(const LabeledOperator& c) const {
  if (!is_trace_replace()) {
    if (c.names().size() != permuted_.size())
      throw LabelError("symmetry map '" + name_ + "' applied to the wrong systems");
    return c - conjugate_by(c, permuted_);
  }
  CMat acc = CMat::Zero(c.dim(), c.dim());
  for (const auto& t : terms_) acc += t.coeff * trace_and_replace(c, t.systems).matrix();
  return c.with_matrix(std::move(acc));
}

LabeledOperator EqualityMap::apply_adjoint(const LabeledOperator& c) const {
  if (is_trace_replace()) return apply(c);  // trace-and-replace is self-adjoint
  return c - conjugate_by(c, inverse_order(c.names(), permuted_));
}

double EqualityMap::pauli_multiplier(const std::vector<std::string>& names,
                                     const std::vector<bool>& identity_on) const {
  if (!is_trace_replace())
    throw DomainError("pauli_multiplier: '" + name_ + "' is not a trace-and-replace map");
  double acc = 0.0;
  for (const auto& t : terms_) {
    bool all = true;
    for (const auto& s : t.systems) {
      auto it = std::find(names.begin(), names.end(), s);
      if (it == names.end()) throw LabelError("pauli_multiplier: unknown system '" + s + "'");
      all = all && identity_on[it - names.begin()];
    }
    if (all) acc += t.coeff;
  }
  return acc;
}

namespace {

std::string I(int k) { return "I" + std::to_string(k); }
std::string O(int k) { return "O" + std::to_string(k); }

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (const auto& x : xs) s += x;
  return s;
}

EqualityMap difference(std::vector<std::string> lhs, std::vector<std::string> rhs) {
  auto name = "_{" + join(lhs) + "}C = _{" + join(rhs) + "}C";
  return EqualityMap::trace_replace(name, {{1.0, std::move(lhs)}, {-1.0, std::move(rhs)}});
}

EqualityMap global_past(int n) {
  std::vector<std::string> all;
  for (int k = 1; k <= n; ++k) {
    all.push_back(I(k));
    all.push_back(O(k));
  }
  all.push_back("F");
  auto with_p = all;
  with_p.insert(with_p.begin(), "P");
  return difference(all, with_p);
}

void require_slots(int n) {
  if (n < 1) throw DomainError("strategy constraints need n >= 1 slots");
}

}  // namespace

StrategyConstraintSet sequential_constraints(int n) {
  require_slots(n);
  StrategyConstraintSet s;
  s.n_slots = n;
  s.kind = StrategyKind::sequential;
  s.trace_value = std::ldexp(1.0, n + 1);
  s.equalities.push_back(difference({"F"}, {O(n), "F"}));
  for (int k = 2; k <= n; ++k) {
    std::vector<std::string> tail;
    for (int j = k; j <= n; ++j) {
      tail.push_back(I(j));
      tail.push_back(O(j));
    }
    tail.push_back("F");
    auto rhs = tail;
    rhs.insert(rhs.begin(), O(k - 1));
    s.equalities.push_back(difference(tail, rhs));
  }
  s.equalities.push_back(global_past(n));
  return s;
}

StrategyConstraintSet ico_constraints(int n) {
  require_slots(n);
  StrategyConstraintSet s;
  s.n_slots = n;
  s.kind = StrategyKind::ico;
  s.trace_value = std::ldexp(1.0, n + 1);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<TraceReplaceTerm> terms;
    for (unsigned sub = mask;; sub = (sub - 1) & mask) {
      std::vector<std::string> xs;
      for (int k = 1; k <= n; ++k) {
        const unsigned bit = 1u << (k - 1);
        if (!(mask & bit)) {
          xs.push_back(I(k));
          xs.push_back(O(k));
        } else if (sub & bit) {
          xs.push_back(O(k));
        }
      }
      xs.push_back("F");
      terms.push_back({std::popcount(sub) % 2 ? -1.0 : 1.0, std::move(xs)});
      if (sub == 0) break;
    }
    std::string name = "S={";
    for (int k = 1; k <= n; ++k)
      if (mask & (1u << (k - 1))) name += std::to_string(k);
    s.equalities.push_back(EqualityMap::trace_replace(name + "}", std::move(terms)));
  }
  s.equalities.push_back(global_past(n));
  return s;
}

StrategyConstraintSet parallel_constraints(int n) {
  require_slots(n);
  StrategyConstraintSet s;
  s.n_slots = n;
  s.kind = StrategyKind::parallel;
  s.trace_value = std::ldexp(1.0, n + 1);
  std::vector<std::string> outs;
  for (int k = 1; k <= n; ++k) outs.push_back(O(k));
  outs.push_back("F");
  s.equalities.push_back(difference({"F"}, outs));
  s.equalities.push_back(global_past(n));
  return s;
}

StrategyConstraintSet constraints_for(StrategyKind kind, int n) {
  switch (kind) {
    case StrategyKind::parallel: return parallel_constraints(n);
    case StrategyKind::sequential: return sequential_constraints(n);
    case StrategyKind::ico: return ico_constraints(n);
  }
  throw DomainError("unknown strategy kind");
}

StrategyConstraintSet with_slot_symmetry(StrategyConstraintSet s) {
  if (s.slot_symmetric) return s;
  for (int k = 1; k < s.n_slots; ++k) {
    std::vector<int> pi(s.n_slots);
    for (int j = 0; j < s.n_slots; ++j) pi[j] = j + 1;
    std::swap(pi[k - 1], pi[k]);
    auto perm = slot_permutation(pi, s.n_slots);
    s.equalities.push_back(EqualityMap::symmetry(
        "C = P_(" + std::to_string(k) + std::to_string(k + 1) + ") C P^dag", perm.image_names));
  }
  s.slot_symmetric = true;
  return s;
}

namespace {

LabeledOperator aligned(const LabeledOperator& c, int n) {
  auto want = strategy_names(n);
  std::set<std::string> a(want.begin(), want.end());
  auto names = c.names();
  std::set<std::string> b(names.begin(), names.end());
  if (a != b || names.size() != want.size())
    throw LabelError("strategy operator does not act on P I^n O^n F");
  return permute_systems(c, want);
}

}  // namespace

StrategyReport check_strategy(const LabeledOperator& c, const StrategyConstraintSet& s,
                              double tol) {
  auto cc = aligned(c, s.n_slots);
  StrategyReport r;
  for (const auto& m : s.equalities) {
    double res = max_abs(m.apply(cc).matrix());
    r.residuals.emplace_back(m.name(), res);
    r.max_residual = std::max(r.max_residual, res);
  }
  r.trace_residual = std::abs(cc.trace() - s.trace_value);
  CMat herm = 0.5 * (cc.matrix() + cc.matrix().adjoint());
  if (max_abs(cc.matrix() - herm) > 1e-12 * std::max(1.0, max_abs(herm))) {
    r.min_eigenvalue = -std::numeric_limits<double>::infinity();
  } else {
    r.min_eigenvalue = check_psd(herm, tol).min_eigenvalue;
  }
  r.feasible = r.max_residual <= tol && r.trace_residual <= tol && r.min_eigenvalue >= -tol;
  return r;
}

SlotPermutation slot_permutation(const std::vector<int>& pi, int n) {
  if (n < 1 || static_cast<int>(pi.size()) != n)
    throw DomainError("slot_permutation: permutation size does not match n");
  std::vector<int> inv(n, -1);
  for (int k = 0; k < n; ++k) {
    if (pi[k] < 1 || pi[k] > n || inv[pi[k] - 1] != -1)
      throw DomainError("slot_permutation: not a permutation of 1..n");
    inv[pi[k] - 1] = k + 1;
  }
  SlotPermutation out;
  out.pi = pi;
  out.image_names.push_back("P");
  for (int j = 1; j <= n; ++j) {
    out.image_names.push_back(I(inv[j - 1]));
    out.image_names.push_back(O(inv[j - 1]));
  }
  out.image_names.push_back("F");
  // position order in canonical numbering: P=0, I_k = 2k-1, O_k = 2k, F = 2n+1
  std::vector<int> order;
  order.push_back(0);
  for (int j = 1; j <= n; ++j) {
    order.push_back(2 * inv[j - 1] - 1);
    order.push_back(2 * inv[j - 1]);
  }
  order.push_back(2 * n + 1);
  auto map = kernels::permutation_map(std::vector<int>(2 * n + 2, 2), order);
  const Index d = static_cast<Index>(map.size());
  out.matrix = CMat::Zero(d, d);
  for (Index i = 0; i < d; ++i) out.matrix(i, map[i]) = 1.0;
  return out;
}

LabeledOperator trivial_strategy(int n) {
  require_slots(n);
  CVec phi = CVec::Zero(4);
  phi(0) = phi(3) = 1.0;
  CMat wire = phi * phi.adjoint();
  auto c = tensor(LabeledOperator(qubits({"P", "I1"}), wire),
                  LabeledOperator(qubits({"O1", "F"}), wire));
  for (int k = 2; k <= n; ++k) {
    c = tensor(c, LabeledOperator(qubits({I(k)}), 0.5 * CMat::Identity(2, 2)));
    c = tensor(c, LabeledOperator::identity(qubits({O(k)})));
  }
  return permute_systems(c, strategy_names(n));
}

}  // namespace qcomb
