#include "qcomb/compile.hpp"

#include <Eigen/QR>

namespace qcomb {

std::vector<SparseEntry> pauli_string_entries(const std::vector<int>& s) {
  const int q = static_cast<int>(s.size());
  const int dim = 1 << q;
  int flip = 0;
  for (int k = 0; k < q; ++k)
    if (s[k] == 1 || s[k] == 2) flip |= 1 << (q - 1 - k);
  std::vector<SparseEntry> out;
  out.reserve(dim);
  for (int r = 0; r < dim; ++r) {
    cplx v = 1.0;
    for (int k = 0; k < q; ++k) {
      const int bit = (r >> (q - 1 - k)) & 1;
      if (s[k] == 2) v *= bit ? I_UNIT : -I_UNIT;
      else if (s[k] == 3 && bit) v = -v;
    }
    out.push_back({r, r ^ flip, v});
  }
  return out;
}

CompiledSystem compile_full(const StrategyConstraintSet& s) {
  const auto names = s.systems();
  const int q = static_cast<int>(names.size());
  for (const auto& m : s.equalities)
    if (!m.is_trace_replace())
      throw DomainError("compile_full: map '" + m.name() +
                        "' is a symmetry; use the reduced compile");
  CompiledSystem cs;
  cs.problem.add_block("C", 1 << q);
  cs.parameters = 1 << (2 * q);
  // identity pattern -> forbidden?
  std::vector<bool> forbidden(1u << q, false);
  for (unsigned pat = 0; pat < (1u << q); ++pat) {
    std::vector<bool> id(q);
    for (int k = 0; k < q; ++k) id[k] = (pat >> (q - 1 - k)) & 1;
    for (const auto& m : s.equalities)
      if (std::abs(m.pauli_multiplier(names, id)) > 1e-12) {
        forbidden[pat] = true;
        break;
      }
  }
  cs.problem.constraints.push_back(
      {{{0, pauli_string_entries(std::vector<int>(q, 0))}}, s.trace_value, "trace"});
  const std::size_t total = std::size_t(1) << (2 * q);
  for (std::size_t code = 1; code < total; ++code) {
    std::vector<int> str(q);
    unsigned pat = 0;
    for (int k = 0; k < q; ++k) {
      str[k] = static_cast<int>((code >> (2 * (q - 1 - k))) & 3);
      if (str[k] == 0) pat |= 1u << (q - 1 - k);
    }
    if (!forbidden[pat]) continue;
    cs.problem.constraints.push_back({{{0, pauli_string_entries(str)}}, 0.0, ""});
  }
  cs.problem.rows_independent = true;
  cs.raw_rows = cs.rank = cs.problem.constraints.size();
  return cs;
}

namespace {

std::vector<int> block_param_offsets(const BlockStructure& bs) {
  std::vector<int> off{0};
  for (const auto& sec : bs.sectors) off.push_back(off.back() + sec.multiplicity * sec.multiplicity);
  return off;
}

RVec block_coords(const std::vector<CMat>& h) {
  Index total = 0;
  for (const auto& b : h) total += b.rows() * b.rows();
  RVec v(total);
  Index at = 0;
  for (const auto& b : h) {
    RVec c = coord_vector(b);
    v.segment(at, c.size()) = c;
    at += c.size();
  }
  return v;
}

// block_project for an operator already in the commutant: every irrep copy
// carries the same block, so one column per multiplicity index suffices.
std::vector<CMat> project_commutant(const CMat& m, const BlockStructure& bs, const CMat& g0) {
  const CMat y = g0.adjoint() * (m * g0);
  std::vector<CMat> out;
  Index at = 0;
  for (const auto& sec : bs.sectors) {
    out.push_back(y.block(at, at, sec.multiplicity, sec.multiplicity));
    at += sec.multiplicity;
  }
  return out;
}

}  // namespace

CompiledSystem compile_reduced(const StrategyConstraintSet& s, const BlockStructure& bs,
                               double tol) {
  if (s.n_slots != bs.n_slots)
    throw DimensionError("compile_reduced: slot count differs from the block structure");
  const auto off = block_param_offsets(bs);
  const int np = off.back();
  const auto sys = qubits(s.systems());
  const Index dim = bs.dim();

  Index ncol = 0;
  for (const auto& sec : bs.sectors) ncol += sec.multiplicity;
  CMat g0(dim, ncol);
  {
    Index at = 0;
    for (const auto& sec : bs.sectors)
      for (int i = 0; i < sec.multiplicity; ++i) g0.col(at++) = bs.basis.col(sec.offset + Index(i) * sec.irrep_dim);
  }

  RMat rows(Index(s.equalities.size()) * np + 1, np);
  std::vector<std::pair<int, int>> work;  // (sector, parameter)
  for (std::size_t k = 0; k < bs.sectors.size(); ++k)
    for (int p = 0; p < bs.sectors[k].multiplicity * bs.sectors[k].multiplicity; ++p)
      work.emplace_back(static_cast<int>(k), p);
  // each item fills its own column of `rows`
#pragma omp parallel for schedule(dynamic)
  for (long w = 0; w < static_cast<long>(work.size()); ++w) {
    const auto [k, p] = work[w];
    const auto& sec = bs.sectors[k];
    const int m = sec.multiplicity, d = sec.irrep_dim;
    const auto gk = bs.basis.middleCols(sec.offset, Index(m) * d);
    {
      RVec e = RVec::Zero(m * m);
      e(p) = 1.0;
      const CMat hp = from_coord_vector(e, m);
      // embed H_k = hp alone: sum_ij hp_ij B_i B_j^dagger
      CMat cm = CMat::Zero(dim, dim);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          if (hp(i, j) == 0.0) continue;
          cm.noalias() += hp(i, j) * gk.middleCols(Index(i) * d, d) * gk.middleCols(Index(j) * d, d).adjoint();
        }
      const LabeledOperator cp(sys, std::move(cm));
      for (std::size_t l = 0; l < s.equalities.size(); ++l) {
        const auto img = s.equalities[l].apply(cp);
        rows.block(Index(l) * np, off[k] + p, np, 1) = block_coords(project_commutant(img.matrix(), bs, g0));
      }
    }
  }
  // trace row: sum_k d_k tr H_k
  RVec tr = RVec::Zero(np);
  for (std::size_t k = 0; k < bs.sectors.size(); ++k)
    for (int i = 0; i < bs.sectors[k].multiplicity; ++i) tr(off[k] + i) = bs.sectors[k].irrep_dim;
  rows.row(rows.rows() - 1) = tr.transpose();

  CompiledSystem cs;
  cs.reduced = true;
  cs.parameters = np;
  cs.raw_rows = rows.rows();
  for (std::size_t k = 0; k < bs.sectors.size(); ++k)
    cs.problem.add_block("H" + std::to_string(k), bs.sectors[k].multiplicity);

  // Rank-reveal with the trace row forced first (it is the only one with rhs != 0).
  Eigen::ColPivHouseholderQR<RMat> qr(rows.topRows(rows.rows() - 1).transpose());
  // Orthonormal basis of the homogeneous row space, then add the trace row.
  Index rank = 0;
  const auto& r = qr.matrixQR();
  const double lead = r.size() ? std::abs(r(0, 0)) : 0.0;
  for (Index i = 0; i < std::min(r.rows(), r.cols()); ++i)
    if (std::abs(r(i, i)) > tol * lead) ++rank;
  RMat q = RMat(qr.householderQ()).leftCols(rank);  // np x rank, spans the rows
  RVec trr = tr - q * (q.transpose() * tr);
  if (trr.norm() < 1e-9 * tr.norm())
    throw InvariantError("compile_reduced: trace condition is implied by homogeneous equalities");

  auto add_row = [&](const RVec& a, double rhs, const std::string& tag) {
    LinearConstraint con;
    con.rhs = rhs;
    con.tag = tag;
    for (std::size_t k = 0; k < bs.sectors.size(); ++k) {
      const int m = bs.sectors[k].multiplicity;
      const RVec seg = a.segment(off[k], m * m);
      if (seg.cwiseAbs().maxCoeff() < 1e-14) continue;
      con.terms.push_back(dense_term(static_cast<int>(k), from_coeff_vector(seg, m)));
    }
    cs.problem.constraints.push_back(std::move(con));
  };
  add_row(tr, s.trace_value, "trace");
  for (Index i = 0; i < rank; ++i) add_row(q.col(i), 0.0, "");
  cs.problem.rows_independent = true;
  cs.rank = static_cast<std::size_t>(rank) + 1;
  return cs;
}

void set_objective(CompiledSystem& cs, const LabeledOperator& omega, const BlockStructure* bs) {
  if (!cs.reduced) {
    const int n = static_cast<int>((omega.systems().size() - 2) / 2);
    const auto o = permute_systems(omega, strategy_names(n));
    if (o.dim() != cs.problem.block_sizes[0])
      throw DimensionError("set_objective: operator size does not match the compiled system");
    // Re tr(C Omega) with C Hermitian: objective block Omega
    cs.problem.objective[0] = 0.5 * (o.matrix() + o.matrix().adjoint());
    return;
  }
  if (!bs) throw DomainError("set_objective: reduced system needs its block structure");
  const auto o = permute_systems(omega, strategy_names(bs->n_slots));
  // tr[C Omega] = sum_k tr[H_k blocktrace(Omega)_k] when Omega is in the commutant;
  // otherwise this is the objective of the twirled operator, the same on twirled C.
  auto bt = block_trace(o.matrix(), *bs);
  for (std::size_t k = 0; k < bt.size(); ++k)
    cs.problem.objective[k] = 0.5 * (bt[k] + bt[k].adjoint());
}

LabeledOperator strategy_from_solution(const CompiledSystem& cs, const SdpSolution& sol,
                                       int n_slots, const BlockStructure* bs) {
  if (!cs.reduced) return {qubits(strategy_names(n_slots)), sol.primal.at(0)};
  if (!bs) throw DomainError("strategy_from_solution: reduced system needs its block structure");
  return block_embed(sol.primal, *bs);
}

}  // namespace qcomb
