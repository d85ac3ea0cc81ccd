#include "qcomb/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>

#include "qcomb/haar.hpp"
#include "qcomb/kernels.hpp"

namespace qcomb {

int BlockStructure::parameter_count() const {
  int p = 0;
  for (const auto& s : sectors) p += s.multiplicity * s.multiplicity;
  return p;
}

namespace {

// Spin-j states built by coupling spin-1/2 factors one at a time.
struct Coupled {
  std::vector<int> path;     // 2j after each coupling step
  int two_j = 1;
  std::vector<RVec> states;  // states[k] has 2m = two_j - 2k
};

// <j1 m1; 1/2 m2 | J M> (Condon-Shortley), all arguments doubled.
double cg_half(int tj1, int tm1, int tm2, int tJ, int tM) {
  if (tm1 + tm2 != tM || std::abs(tm1) > tj1) return 0.0;
  const double den = 2.0 * (tj1 + 1);
  if (tJ == tj1 + 1)
    return tm2 > 0 ? std::sqrt((tj1 + tM + 1) / den) : std::sqrt((tj1 - tM + 1) / den);
  if (tJ == tj1 - 1)
    return tm2 > 0 ? -std::sqrt((tj1 - tM + 1) / den) : std::sqrt((tj1 + tM + 1) / den);
  return 0.0;
}

RVec kron_vec(const RVec& a, const RVec& b) {
  RVec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Spin-j bases for a tensor product of qubit factors. Starred factors carry
// the conjugate representation and use eps = [[0,1],[-1,0]] on the standard
// basis, which intertwines V* with V. Returns 2j -> list of (path, columns
// m = j..-j) in the natural factor order.
std::map<int, std::vector<std::pair<std::vector<int>, RMat>>> side_basis(
    const std::vector<bool>& starred, const std::vector<int>& order) {
  const int k = static_cast<int>(starred.size());
  std::vector<std::array<RVec, 2>> single(k);
  for (int f = 0; f < k; ++f) {
    RVec up(2), down(2);
    if (starred[f]) {
      up << 0, -1;
      down << 1, 0;
    } else {
      up << 1, 0;
      down << 0, 1;
    }
    single[f] = {up, down};
  }
  std::vector<Coupled> states{{{}, 1, {single[order[0]][0], single[order[0]][1]}}};
  for (std::size_t step = 1; step < order.size(); ++step) {
    const auto& e = single[order[step]];
    std::vector<Coupled> next;
    for (const auto& s : states) {
      std::vector<int> targets{s.two_j + 1};
      if (s.two_j > 0) targets.push_back(s.two_j - 1);
      for (int tJ : targets) {
        Coupled c;
        c.path = s.path;
        c.path.push_back(tJ);
        c.two_j = tJ;
        for (int tM = tJ; tM >= -tJ; tM -= 2) {
          RVec v = RVec::Zero(s.states.front().size() * 2);
          for (std::size_t i1 = 0; i1 < s.states.size(); ++i1) {
            const int tm1 = s.two_j - 2 * static_cast<int>(i1);
            for (int b = 0; b < 2; ++b) {
              const int tm2 = b == 0 ? 1 : -1;
              const double coef = cg_half(s.two_j, tm1, tm2, tJ, tM);
              if (coef != 0.0) v += coef * kron_vec(s.states[i1], e[b]);
            }
          }
          c.states.push_back(v);
        }
        next.push_back(std::move(c));
      }
    }
    states = std::move(next);
  }
  // coupling order -> natural order
  std::vector<int> inv(k);
  for (int p = 0; p < k; ++p) inv[order[p]] = p;
  auto map = kernels::permutation_map(std::vector<int>(k, 2), inv);
  std::map<int, std::vector<std::pair<std::vector<int>, RMat>>> out;
  for (const auto& s : states) {
    RMat cols(Index(1) << k, s.states.size());
    for (std::size_t m = 0; m < s.states.size(); ++m)
      for (Index r = 0; r < cols.rows(); ++r) cols(r, m) = s.states[m](map[r]);
    out[s.two_j].emplace_back(s.path, std::move(cols));
  }
  return out;
}

// For n = 2 the multiplicity bases are re-ordered and re-phased so that the
// reduced blocks take the standard printed form (Omega_00 etc.).
void align_two_slot(BlockStructure& bs) {
  struct Fix {
    std::vector<int> perm;
    std::vector<cplx> phase;
  };
  const std::map<int, Fix> fixes{
      {0, {{0, 3, 2, 1}, {1.0, -1.0, I_UNIT, I_UNIT}}},
      {1, {{0, 1}, {1.0, I_UNIT}}},
  };
  CMat g = bs.basis;
  for (const auto& [k, fix] : fixes) {
    const auto& s = bs.sectors[k];
    for (int i = 0; i < s.multiplicity; ++i)
      for (int t = 0; t < s.irrep_dim; ++t)
        g.col(s.offset + i * s.irrep_dim + t) =
            fix.phase[i] * bs.basis.col(s.offset + fix.perm[i] * s.irrep_dim + t);
  }
  bs.basis = std::move(g);
}

}  // namespace

BlockStructure build_block_structure(int n) {
  if (n != 2 && n != 3) throw DomainError("build_block_structure supports n in {2, 3}");
  BlockStructure bs;
  bs.n_slots = n;
  // V side: P, I1..In with slots coupled first; W side: O1..On then F.
  std::vector<bool> v_star{false}, w_star;
  for (int k = 0; k < n; ++k) {
    v_star.push_back(true);
    w_star.push_back(true);
    bs.v_coupling.push_back(k + 1);
    bs.w_coupling.push_back(k);
  }
  w_star.push_back(false);
  bs.v_coupling.push_back(0);
  bs.w_coupling.push_back(n);
  auto vs = side_basis(v_star, bs.v_coupling);
  auto ws = side_basis(w_star, bs.w_coupling);

  const Index half = Index(1) << (n + 1);
  const Index dim = half * half;
  RMat g(dim, dim);
  Index col = 0;
  for (const auto& [ja, va] : vs)
    for (const auto& [jb, wb] : ws) {
      Sector s;
      s.two_jv = ja;
      s.two_jw = jb;
      s.multiplicity = static_cast<int>(va.size() * wb.size());
      s.irrep_dim = (ja + 1) * (jb + 1);
      s.offset = col;
      bs.sectors.push_back(s);
      for (const auto& pa : va)
        for (const auto& pb : wb)
          for (Index i = 0; i < pa.second.cols(); ++i)
            for (Index j = 0; j < pb.second.cols(); ++j) {
              for (Index r = 0; r < half; ++r)
                g.col(col).segment(r * half, half) = pa.second(r, i) * pb.second.col(j);
              ++col;
            }
    }
  if (col != dim) throw InvariantError("block structure does not span the full space");

  // rows: (P, I1..In, O1..On, F) -> canonical (P, I1, O1, ..., F)
  std::vector<int> order{0};
  for (int k = 1; k <= n; ++k) {
    order.push_back(k);
    order.push_back(n + k);
  }
  order.push_back(2 * n + 1);
  bs.factor_order = order;
  auto map = kernels::permutation_map(std::vector<int>(2 * n + 2, 2), order);
  bs.basis = CMat(dim, dim);
  for (Index r = 0; r < dim; ++r) bs.basis.row(r) = g.row(map[r]).cast<cplx>();
  if (n == 2) align_two_slot(bs);

  if (max_abs(bs.basis.adjoint() * bs.basis - CMat::Identity(dim, dim)) > 1e-12)
    throw InvariantError("block structure basis is not unitary");
  return bs;
}

const BlockStructure& block_structure(int n) {
  if (n == 2) {
    static const BlockStructure b2 = build_block_structure(2);
    return b2;
  }
  if (n == 3) {
    static const BlockStructure b3 = build_block_structure(3);
    return b3;
  }
  throw DomainError("block_structure supports n in {2, 3}");
}

CMat group_action(const Mat2& v, const Mat2& w, int n) {
  CMat out = v;
  for (int k = 0; k < n; ++k) {
    out = kron(out, v.conjugate());
    out = kron(out, w.conjugate());
  }
  return kron(out, w);
}

namespace {

void require_dim(const CMat& m, const BlockStructure& bs) {
  if (m.rows() != bs.dim() || m.cols() != bs.dim())
    throw DimensionError("operator size does not match the block structure");
}

}  // namespace

std::vector<CMat> block_trace(const CMat& m, const BlockStructure& bs) {
  require_dim(m, bs);
  const CMat y = m * bs.basis;
  std::vector<CMat> out;
  for (const auto& s : bs.sectors) {
    const Index w = Index(s.multiplicity) * s.irrep_dim;
    const CMat z = bs.basis.middleCols(s.offset, w).adjoint() * y.middleCols(s.offset, w);
    CMat h = CMat::Zero(s.multiplicity, s.multiplicity);
    for (int i = 0; i < s.multiplicity; ++i)
      for (int j = 0; j < s.multiplicity; ++j)
        for (int t = 0; t < s.irrep_dim; ++t)
          h(i, j) += z(i * s.irrep_dim + t, j * s.irrep_dim + t);
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<CMat> block_project(const CMat& m, const BlockStructure& bs) {
  auto out = block_trace(m, bs);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] /= bs.sectors[k].irrep_dim;
  return out;
}

LabeledOperator block_embed(const std::vector<CMat>& blocks, const BlockStructure& bs) {
  if (blocks.size() != bs.sectors.size())
    throw DimensionError("block_embed: wrong number of blocks");
  const Index dim = bs.dim();
  CMat out = CMat::Zero(dim, dim);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& s = bs.sectors[k];
    const int m = s.multiplicity, d = s.irrep_dim;
    if (blocks[k].rows() != m || blocks[k].cols() != m)
      throw DimensionError("block_embed: block " + std::to_string(k) + " has the wrong size");
    const auto gk = bs.basis.middleCols(s.offset, Index(m) * d);
    CMat b = CMat::Zero(dim, Index(m) * d);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        if (blocks[k](i, j) == 0.0) continue;
        for (int t = 0; t < d; ++t) b.col(j * d + t) += blocks[k](i, j) * gk.col(i * d + t);
      }
    out.noalias() += b * gk.adjoint();
  }
  return {qubits(strategy_names(bs.n_slots)), std::move(out)};
}

std::vector<CMat> block_extract(const LabeledOperator& c, const BlockStructure& bs, double tol) {
  auto cc = permute_systems(c, strategy_names(bs.n_slots));
  auto h = block_project(cc.matrix(), bs);
  const double err = max_abs(block_embed(h, bs).matrix() - cc.matrix());
  if (err > tol * std::max(1.0, max_abs(cc.matrix())))
    throw InvariantError("block_extract: operator does not commute with U_{V,W} (deviation " +
                         std::to_string(err) + ")");
  return h;
}

LabeledOperator twirl(const LabeledOperator& c, const BlockStructure& bs) {
  auto want = strategy_names(bs.n_slots);
  auto cc = permute_systems(c, want);
  return block_embed(block_project(cc.matrix(), bs), bs);
}

LabeledOperator twirl(const LabeledOperator& c, int n) { return twirl(c, block_structure(n)); }

void export_matrix(const CMat& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::int64_t rows = m.rows(), cols = m.cols();
  f.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  f.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      f.write(reinterpret_cast<const char*>(&re), sizeof re);
      f.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

CMat import_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::int64_t rows = 0, cols = 0;
  f.read(reinterpret_cast<char*>(&rows), sizeof rows);
  f.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!f || rows < 0 || cols < 0 || rows > (1 << 16) || cols > (1 << 16))
    throw std::runtime_error("'" + path + "' has a bad header");
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      f.read(reinterpret_cast<char*>(&re), sizeof re);
      f.read(reinterpret_cast<char*>(&im), sizeof im);
      m(i, j) = cplx(re, im);
    }
  if (!f) throw std::runtime_error("'" + path + "' is truncated");
  return m;
}

}  // namespace qcomb
