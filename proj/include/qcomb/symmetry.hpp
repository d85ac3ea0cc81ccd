#pragma once

#include <string>
#include <vector>

#include "qcomb/tensor.hpp"

namespace qcomb {

// One isotypic sector of V (x) V*^{(x)n} (x) W*^{(x)n} (x) W: spin j_V on the
// (P, I..) side, spin j_W on the (O.., F) side.
struct Sector {
  int two_jv = 0;
  int two_jw = 0;
  int multiplicity = 0;
  int irrep_dim = 0;
  Index offset = 0;  // first column in the basis change
};

// Columns of `basis` are ordered sector -> multiplicity index -> irrep index,
// so G^dagger C G = (+)_k H_k (x) I_{d_k} for every C in the commutant.
struct BlockStructure {
  int n_slots = 0;
  CMat basis;
  std::vector<Sector> sectors;
  // Coupling order of factors (P, I1..In) on the V side and (O1..On, F) on
  // the W side, as indices into those lists.
  std::vector<int> v_coupling, w_coupling;
  // Row permutation: canonical position p holds factor factor_order[p] of
  // the list P, I1..In, O1..On, F.
  std::vector<int> factor_order;

  Index dim() const { return basis.rows(); }
  int parameter_count() const;  // sum of m_k^2 (real parameters)
};

BlockStructure build_block_structure(int n);
// Cached, built once per n; safe to share between threads.
const BlockStructure& block_structure(int n);

// V_P (x) (V* (x) W*)^{(x)n} (x) W_F in canonical order.
CMat group_action(const Mat2& v, const Mat2& w, int n);

// tr over the irrep factor of each diagonal block of G^dagger M G.
std::vector<CMat> block_trace(const CMat& m, const BlockStructure& bs);
// block_trace / d_k: the H_k of the commutant projection.
std::vector<CMat> block_project(const CMat& m, const BlockStructure& bs);
// block_project plus a check that c really lies in the commutant.
std::vector<CMat> block_extract(const LabeledOperator& c, const BlockStructure& bs,
                                double tol = 1e-8);
LabeledOperator block_embed(const std::vector<CMat>& blocks, const BlockStructure& bs);
LabeledOperator twirl(const LabeledOperator& c, const BlockStructure& bs);
LabeledOperator twirl(const LabeledOperator& c, int n);

// Binary file: int64 rows, int64 cols, then row-major (re, im) doubles.
void export_matrix(const CMat& m, const std::string& path);
CMat import_matrix(const std::string& path);

}  // namespace qcomb
