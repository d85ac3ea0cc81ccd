#include "qcomb/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace qcomb {

int SdpProblem::add_block(const std::string& name, int size) {
  if (size < 1) throw DimensionError("SDP block '" + name + "' must have size >= 1");
  block_names.push_back(name);
  block_sizes.push_back(size);
  objective.push_back(CMat::Zero(size, size));
  return static_cast<int>(block_sizes.size()) - 1;
}

int SdpProblem::block_index(const std::string& name) const {
  for (std::size_t k = 0; k < block_names.size(); ++k)
    if (block_names[k] == name) return static_cast<int>(k);
  throw LabelError("no SDP block named '" + name + "'");
}

BlockTerm diag_term(int block, int i, double coeff) { return {block, {{i, i, coeff}}}; }

BlockTerm re_term(int block, int i, int j, double coeff) {
  return {block, {{i, j, coeff / 2}, {j, i, coeff / 2}}};
}

BlockTerm im_term(int block, int i, int j, double coeff) {
  // Re tr(A X) with A_ij = i c/2, A_ji = -i c/2 equals c Im X_ij
  return {block, {{i, j, I_UNIT * (coeff / 2)}, {j, i, -I_UNIT * (coeff / 2)}}};
}

BlockTerm dense_term(int block, const CMat& a) {
  BlockTerm t{block, {}};
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != 0.0) t.entries.push_back({int(i), int(j), a(i, j)});
  return t;
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::unbounded: return "unbounded";
    case SdpStatus::max_iterations: return "max_iterations";
    case SdpStatus::numerical_error: return "numerical_error";
  }
  return "?";
}

RVec coord_vector(const CMat& x) {
  const Index n = x.rows();
  RVec v(n * n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) v(k++) = x(i, i).real();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      v(k++) = x(i, j).real();
      v(k++) = x(i, j).imag();
    }
  return v;
}

RVec coeff_vector(const CMat& a) {
  const Index n = a.rows();
  RVec v(n * n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) v(k++) = a(i, i).real();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      // Re(a_ij conj(x_ij) + a_ji x_ij) with a Hermitian = 2 Re a_ij Re x_ij + 2 Im a_ij Im x_ij
      const cplx s = a(i, j) + std::conj(a(j, i));
      v(k++) = s.real();
      v(k++) = s.imag();
    }
  return v;
}

CMat from_coeff_vector(const RVec& a, int n) {
  CMat m = CMat::Zero(n, n);
  Index k = 0;
  for (int i = 0; i < n; ++i) m(i, i) = a(k++);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const cplx c(a(k), a(k + 1));
      k += 2;
      m(i, j) = c / 2.0;
      m(j, i) = std::conj(c) / 2.0;
    }
  return m;
}

CMat from_coord_vector(const RVec& x, int n) {
  CMat m = CMat::Zero(n, n);
  Index k = 0;
  for (int i = 0; i < n; ++i) m(i, i) = x(k++);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = cplx(x(k), x(k + 1));
      m(j, i) = std::conj(m(i, j));
      k += 2;
    }
  return m;
}

namespace {

void validate(const SdpProblem& p) {
  const std::size_t nb = p.block_sizes.size();
  if (p.objective.size() != nb || p.block_names.size() != nb)
    throw DimensionError("SDP: block lists have different lengths");
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& c = p.objective[b];
    if (c.rows() != p.block_sizes[b] || c.cols() != p.block_sizes[b])
      throw DimensionError("SDP: objective block '" + p.block_names[b] + "' has the wrong size");
    if (max_abs(c - c.adjoint()) > 1e-12 * std::max(1.0, max_abs(c)))
      throw InvariantError("SDP: objective block '" + p.block_names[b] + "' is not Hermitian");
  }
  for (const auto& con : p.constraints)
    for (const auto& t : con.terms) {
      if (t.block < 0 || t.block >= static_cast<int>(nb))
        throw DimensionError("SDP: constraint '" + con.tag + "' refers to a missing block");
      for (const auto& e : t.entries)
        if (e.row < 0 || e.col < 0 || e.row >= p.block_sizes[t.block] ||
            e.col >= p.block_sizes[t.block])
          throw DimensionError("SDP: constraint '" + con.tag + "' has an out-of-range entry");
    }
}

std::vector<Index> block_offsets(const SdpProblem& p) {
  std::vector<Index> off{0};
  for (int n : p.block_sizes) off.push_back(off.back() + Index(n) * n);
  return off;
}

}  // namespace

RMat constraint_matrix(const SdpProblem& p) {
  auto off = block_offsets(p);
  RMat a = RMat::Zero(p.constraints.size(), off.back());
  for (std::size_t i = 0; i < p.constraints.size(); ++i)
    for (const auto& t : p.constraints[i].terms) {
      const int n = p.block_sizes[t.block];
      CMat m = CMat::Zero(n, n);
      for (const auto& e : t.entries) m(e.row, e.col) += e.value;
      a.row(i).segment(off[t.block], Index(n) * n) += coeff_vector(m).transpose();
    }
  return a;
}

RowReduction reduce_rows(const SdpProblem& p, double tol) {
  RowReduction r;
  const RMat a = constraint_matrix(p);
  if (a.rows() == 0) return r;
  RVec b(a.rows());
  for (Index i = 0; i < a.rows(); ++i) b(i) = p.constraints[i].rhs;
  Eigen::ColPivHouseholderQR<RMat> qr(a.transpose());
  const double lead = std::abs(qr.matrixQR()(0, 0));
  Index rank = 0;
  for (Index k = 0; k < std::min(qr.matrixQR().rows(), qr.matrixQR().cols()); ++k)
    if (std::abs(qr.matrixQR()(k, k)) > tol * std::max(lead, 1e-300)) ++rank;
  r.rank = static_cast<std::size_t>(rank);
  const auto& perm = qr.colsPermutation().indices();
  for (Index k = 0; k < rank; ++k) r.kept.push_back(static_cast<std::size_t>(perm(k)));
  std::sort(r.kept.begin(), r.kept.end());
  if (static_cast<Index>(r.kept.size()) < a.rows()) {
    // express every row through the kept ones and compare right-hand sides
    RMat ak(r.kept.size(), a.cols());
    RVec bk(r.kept.size());
    for (std::size_t k = 0; k < r.kept.size(); ++k) {
      ak.row(k) = a.row(r.kept[k]);
      bk(k) = b(r.kept[k]);
    }
    Eigen::ColPivHouseholderQR<RMat> qk(ak.transpose());
    RMat coef = qk.solve(a.transpose());  // kept x all
    RVec pred = coef.transpose() * bk;
    r.inconsistency = (pred - b).cwiseAbs().maxCoeff();
    if (r.inconsistency > 1e-7 * (1.0 + b.cwiseAbs().maxCoeff()))
      throw InvariantError("constraint system is inconsistent (residual " +
                           std::to_string(r.inconsistency) + ")");
  }
  return r;
}

namespace {

// Constraints touching each block, one merged term per (constraint, block).
struct BlockIndex {
  std::vector<BlockTerm> merged;
  std::vector<std::vector<std::pair<int, const BlockTerm*>>> by_block;
};

BlockIndex index_blocks(const SdpProblem& p) {
  BlockIndex ix;
  ix.by_block.resize(p.block_sizes.size());
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    std::vector<int> slot(p.block_sizes.size(), -1);
    for (const auto& t : p.constraints[i].terms) {
      if (slot[t.block] < 0) {
        slot[t.block] = static_cast<int>(ix.merged.size());
        ix.merged.push_back({t.block, {}});
      }
      auto& e = ix.merged[slot[t.block]].entries;
      e.insert(e.end(), t.entries.begin(), t.entries.end());
    }
    for (std::size_t b = 0; b < slot.size(); ++b)
      if (slot[b] >= 0) ix.by_block[b].emplace_back(static_cast<int>(i), nullptr);
  }
  // pointers are taken only once `merged` has stopped growing
  std::vector<std::size_t> cursor(p.block_sizes.size(), 0);
  for (const auto& t : ix.merged) ix.by_block[t.block][cursor[t.block]++].second = &t;
  return ix;
}

// T = W (A W) for one sparse term.
void left_apply(const BlockTerm& t, const CMat& w, Eigen::Ref<CMat> out) {
  out.setZero();
  for (const auto& e : t.entries) out.row(e.row) += e.value * w.row(e.col);
}

double pair_trace(const BlockTerm& t, const Eigen::Ref<const CMat>& m) {
  // Re tr(A M) = Re sum A(r,c) M(c,r)
  double acc = 0.0;
  for (const auto& e : t.entries) acc += (e.value * m(e.col, e.row)).real();
  return acc;
}

constexpr int kSchurChunk = 32;

void schur_block(const std::vector<std::pair<int, const BlockTerm*>>& items, const CMat& w,
                 std::size_t c0, std::size_t c1, RMat& m) {
  const Index n = w.rows();
  const Index cnt = static_cast<Index>(c1 - c0);
  CMat aw(n, n * cnt);
  for (std::size_t j = c0; j < c1; ++j)
    left_apply(*items[j].second, w, aw.middleCols(Index(j - c0) * n, n));
  const CMat t = w * aw;
  for (std::size_t j = c0; j < c1; ++j) {
    const auto tj = t.middleCols(Index(j - c0) * n, n);
    for (std::size_t i = 0; i <= j; ++i) {
      // rows i <= j; the lower triangle is mirrored afterwards
      m(items[i].first, items[j].first) += pair_trace(*items[i].second, tj);
    }
  }
}

void mirror_upper(RMat& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i) {
      // each unordered pair was accumulated once into one of the two slots
      const double s = m(i, j) + m(j, i);
      m(i, j) = m(j, i) = s;
    }
}

}  // namespace

RMat schur_complement_serial(const SdpProblem& p, const std::vector<CMat>& w) {
  const auto ix = index_blocks(p);
  const Index mm = static_cast<Index>(p.constraints.size());
  RMat m = RMat::Zero(mm, mm);
  for (std::size_t b = 0; b < ix.by_block.size(); ++b) {
    const auto& items = ix.by_block[b];
    for (std::size_t c0 = 0; c0 < items.size(); c0 += kSchurChunk)
      schur_block(items, w[b], c0, std::min(items.size(), c0 + kSchurChunk), m);
  }
  mirror_upper(m);
  return m;
}

RMat schur_complement_omp(const SdpProblem& p, const std::vector<CMat>& w) {
  const auto ix = index_blocks(p);
  const Index mm = static_cast<Index>(p.constraints.size());
  // One accumulator per block keeps the summation order fixed.
  std::vector<RMat> per_block(ix.by_block.size());
  for (std::size_t b = 0; b < ix.by_block.size(); ++b) {
    const auto& items = ix.by_block[b];
    RMat mb = RMat::Zero(mm, mm);
    const long chunks = static_cast<long>((items.size() + kSchurChunk - 1) / kSchurChunk);
    // chunks write disjoint columns (items[j].first for j in the chunk)
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < chunks; ++c) {
      const std::size_t c0 = static_cast<std::size_t>(c) * kSchurChunk;
      schur_block(items, w[b], c0, std::min(items.size(), c0 + kSchurChunk), mb);
    }
    per_block[b] = std::move(mb);
  }
  RMat m = RMat::Zero(mm, mm);
  for (auto& mb : per_block) m += mb;
  mirror_upper(m);
  return m;
}

namespace {

using Blocks = std::vector<CMat>;

struct Work {
  const SdpProblem& p;
  BlockIndex ix;
  RVec b;
  Blocks c;  // minimization cost = -objective
};

RVec apply_a(const Work& w, const Blocks& x) {
  RVec out = RVec::Zero(w.p.constraints.size());
  for (std::size_t i = 0; i < w.p.constraints.size(); ++i)
    for (const auto& t : w.p.constraints[i].terms) out(i) += pair_trace(t, x[t.block]);
  return out;
}

Blocks apply_at(const Work& w, const RVec& y) {
  Blocks out;
  for (int n : w.p.block_sizes) out.push_back(CMat::Zero(n, n));
  for (std::size_t i = 0; i < w.p.constraints.size(); ++i)
    for (const auto& t : w.p.constraints[i].terms)
      for (const auto& e : t.entries) out[t.block](e.row, e.col) += y(i) * e.value;
  return out;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].adjoint() * b[k]).trace().real();
  return s;
}

double fro(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Blocks combine(const Blocks& a, double s, const Blocks& b) {
  Blocks out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + s * b[k];
  return out;
}

CMat herm(const CMat& m) { return 0.5 * (m + m.adjoint()); }

// Largest step a with X + a dX >= 0, given a Cholesky factor of X.
double max_step(const std::vector<CMat>& chol, const Blocks& dx) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dx.size(); ++k) {
    const auto l = chol[k].triangularView<Eigen::Lower>();
    CMat t = l.solve(dx[k]);
    t = l.solve(t.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(t), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < 0) step = std::min(step, -1.0 / lo);
  }
  return step;
}

bool cholesky_all(const Blocks& x, std::vector<CMat>& out) {
  out.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<CMat> llt(herm(x[k]));
    if (llt.info() != Eigen::Success) return false;
    out[k] = llt.matrixL();
  }
  return true;
}

struct Scaling {
  std::vector<CMat> g, ginv;  // G, G^{-1}
  std::vector<RVec> d;        // G^{-1} X G^{-*} = G^* S G = diag(d)
  Blocks w;                   // G G^*
};

bool nt_scaling(const std::vector<CMat>& lx, const std::vector<CMat>& ls, Scaling& sc) {
  const std::size_t nb = lx.size();
  sc.g.resize(nb);
  sc.ginv.resize(nb);
  sc.d.resize(nb);
  sc.w.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    Eigen::JacobiSVD<CMat> svd(ls[k].adjoint() * lx[k], Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVec sig = svd.singularValues();
    if (sig.minCoeff() <= 0.0 || !std::isfinite(sig.maxCoeff())) return false;
    const RVec isq = sig.cwiseSqrt().cwiseInverse();
    sc.g[k] = lx[k] * svd.matrixV() * isq.asDiagonal();
    // G^{-1} = Sigma^{1/2} V^* L_X^{-1} = Sigma^{-1/2} U^* L_S^*
    sc.ginv[k] = isq.asDiagonal() * svd.matrixU().adjoint() * ls[k].adjoint();
    sc.d[k] = sig;
    sc.w[k] = herm(sc.g[k] * sc.g[k].adjoint());
  }
  return true;
}

struct Newton {
  Eigen::LDLT<RMat> ldlt;
  Eigen::LLT<RMat> llt;
  bool use_llt = true;
  bool regularized = false;
  bool ok = false;

  void factor(RMat m) {
    llt.compute(m);
    if (llt.info() == Eigen::Success) {
      use_llt = true;
      ok = true;
      return;
    }
    const double scale = std::max(1e-300, m.diagonal().cwiseAbs().maxCoeff());
    for (double reg : {1e-14, 1e-12, 1e-10, 1e-8}) {
      RMat mr = m;
      mr.diagonal().array() += reg * scale;
      llt.compute(mr);
      if (llt.info() == Eigen::Success) {
        use_llt = true;
        ok = regularized = true;
        return;
      }
    }
    ldlt.compute(m);
    use_llt = false;
    regularized = true;
    ok = ldlt.info() == Eigen::Success;
  }

  RVec solve(const RVec& r) const { return use_llt ? RVec(llt.solve(r)) : RVec(ldlt.solve(r)); }
};

// Search direction for a scaled right-hand side rt (in the G basis).
void direction(const Work& wk, const Scaling& sc, const Newton& nw, const RVec& rp,
               const Blocks& rd, const Blocks& rt, Blocks& dx, RVec& dy, Blocks& ds) {
  const std::size_t nb = rt.size();
  Blocks rc(nb), wrw(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    rc[k] = herm(sc.g[k] * rt[k] * sc.g[k].adjoint());
    wrw[k] = herm(sc.w[k] * rd[k] * sc.w[k]);
  }
  const RVec rhs = rp - apply_a(wk, rc) + apply_a(wk, wrw);
  dy = nw.solve(rhs);
  const Blocks aty = apply_at(wk, dy);
  ds.resize(nb);
  dx.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    ds[k] = herm(rd[k] - aty[k]);
    dx[k] = herm(rc[k] - sc.w[k] * ds[k] * sc.w[k]);
  }
}

Blocks scaled_rhs(const Scaling& sc, double sigma_mu, const Blocks* dxa, const Blocks* dsa) {
  const std::size_t nb = sc.d.size();
  Blocks rt(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const RVec& d = sc.d[k];
    const Index n = d.size();
    CMat q = CMat::Zero(n, n);
    if (dxa) {
      const CMat xt = sc.ginv[k] * (*dxa)[k] * sc.ginv[k].adjoint();
      const CMat st = sc.g[k].adjoint() * (*dsa)[k] * sc.g[k];
      q = xt * st + st * xt;
    }
    CMat r(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        cplx v = -q(i, j);
        if (i == j) v += 2.0 * sigma_mu - 2.0 * d(i) * d(i);
        r(i, j) = v / (d(i) + d(j));
      }
    rt[k] = herm(r);
  }
  return rt;
}

}  // namespace

SdpSolution solve(const SdpProblem& p_in, const SdpOptions& opt) {
  validate(p_in);
  SdpSolution sol;

  // presolve: drop dependent rows
  SdpProblem reduced;
  const SdpProblem* pp = &p_in;
  if (opt.presolve && !p_in.rows_independent && !p_in.constraints.empty()) {
    auto rr = reduce_rows(p_in);
    if (rr.kept.size() < p_in.constraints.size()) {
      reduced = p_in;
      reduced.constraints.clear();
      for (auto k : rr.kept) reduced.constraints.push_back(p_in.constraints[k]);
      pp = &reduced;
    }
  }
  const SdpProblem& p = *pp;
  sol.kept_constraints = p.constraints.size();

  Work wk{p, index_blocks(p), RVec(p.constraints.size()), {}};
  for (std::size_t i = 0; i < p.constraints.size(); ++i) wk.b(i) = p.constraints[i].rhs;
  for (const auto& c : p.objective) wk.c.push_back(-c);

  const std::size_t nb = p.block_sizes.size();
  double ntot = 0;
  for (int n : p.block_sizes) ntot += n;

  // starting point
  double max_a = 0.0;
  {
    Blocks unit;
    for (int n : p.block_sizes) unit.push_back(CMat::Zero(n, n));
    for (const auto& con : p.constraints) {
      double s = 0;
      for (const auto& t : con.terms)
        for (const auto& e : t.entries) s += std::norm(e.value);
      max_a = std::max(max_a, std::sqrt(s));
    }
  }
  double xi = std::max(10.0, std::sqrt(ntot));
  for (const auto& con : p.constraints) {
    double s = 0;
    for (const auto& t : con.terms)
      for (const auto& e : t.entries) s += std::norm(e.value);
    xi = std::max(xi, ntot * (1.0 + std::abs(con.rhs)) / (1.0 + std::sqrt(s)));
  }
  const double eta = std::max({10.0, std::sqrt(ntot), max_a, fro(wk.c)});
  Blocks x, s;
  for (int n : p.block_sizes) {
    x.push_back(xi * CMat::Identity(n, n));
    s.push_back(eta * CMat::Identity(n, n));
  }
  RVec y = RVec::Zero(p.constraints.size());

  const double bnorm = wk.b.size() ? wk.b.norm() : 0.0;
  const double cnorm = fro(wk.c);
  auto log = [&](int it, double pobj, double dobj, double pinf, double dinf, double mu) {
    if (!opt.log) return;
    *opt.log << std::setw(3) << it << std::scientific << std::setprecision(6) << "  p " << pobj
             << "  d " << dobj << "  pinf " << pinf << "  dinf " << dinf << "  mu " << mu << '\n';
  };

  sol.status = SdpStatus::max_iterations;
  int stall = 0;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    sol.iterations = it;
    const RVec rp = wk.b - apply_a(wk, x);
    const Blocks aty = apply_at(wk, y);
    Blocks rd(nb);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = herm(wk.c[k] - aty[k] - s[k]);
    const double pobj = inner(wk.c, x);
    const double dobj = wk.b.dot(y);
    const double mu = inner(x, s) / ntot;
    const double pinf = (rp.size() ? rp.norm() : 0.0) / (1.0 + bnorm);
    const double dinf = fro(rd) / (1.0 + cnorm);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double compl_gap = mu * ntot / (1.0 + std::abs(pobj) + std::abs(dobj));
    log(it, -pobj, -dobj, pinf, dinf, mu);

    if (std::max({relgap, compl_gap, pinf, dinf}) < opt.tol) {
      sol.status = SdpStatus::optimal;
      break;
    }
    // divergence => certificate of infeasibility in the limit
    if (fro(x) > 1e12 * (1.0 + xi)) {
      sol.status = SdpStatus::unbounded;
      break;
    }
    if (y.size() && (y.norm() > 1e12 * (1.0 + eta) || fro(s) > 1e12 * (1.0 + eta))) {
      sol.status = SdpStatus::infeasible;
      break;
    }
    if (it == opt.max_iterations) break;

    std::vector<CMat> lx, ls;
    if (!cholesky_all(x, lx) || !cholesky_all(s, ls)) {
      sol.status = SdpStatus::numerical_error;
      break;
    }
    Scaling sc;
    if (!nt_scaling(lx, ls, sc)) {
      sol.status = SdpStatus::numerical_error;
      break;
    }
    Newton nw;
    nw.factor(opt.parallel ? schur_complement_omp(p, sc.w) : schur_complement_serial(p, sc.w));
    if (!nw.ok) {
      sol.status = SdpStatus::numerical_error;
      break;
    }
    sol.regularized = sol.regularized || nw.regularized;

    // predictor
    Blocks dxa, dsa;
    RVec dya;
    direction(wk, sc, nw, rp, rd, scaled_rhs(sc, 0.0, nullptr, nullptr), dxa, dya, dsa);
    const double ap = std::min(1.0, max_step(lx, dxa));
    const double ad = std::min(1.0, max_step(ls, dsa));
    const double mu_aff = inner(combine(x, ap, dxa), combine(s, ad, dsa)) / ntot;
    const double expo = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), expo);
    if (std::min(pinf, dinf) > 1e3 * opt.tol) sigma = std::max(sigma, 0.0);

    // corrector
    Blocks dx, ds;
    RVec dy;
    direction(wk, sc, nw, rp, rd, scaled_rhs(sc, sigma * mu, &dxa, &dsa), dx, dy, ds);
    const double tau = std::max(0.9, 1.0 - 10.0 * mu / (1.0 + mu));
    const double tp = std::min(0.98, tau);
    const double sp = std::min(1.0, tp * max_step(lx, dx));
    const double sd = std::min(1.0, tp * max_step(ls, ds));
    if (sp < 1e-10 && sd < 1e-10) {
      if (++stall > 3) {
        sol.status = SdpStatus::numerical_error;
        break;
      }
    } else {
      stall = 0;
    }
    x = combine(x, sp, dx);
    s = combine(s, sd, ds);
    y += sd * dy;
    for (auto& m : x) m = herm(m);
    for (auto& m : s) m = herm(m);
  }

  sol.primal = x;
  sol.slack = s;
  sol.dual = -y;  // maximization sign convention
  sol.primal_value = -inner(wk.c, x) + p.constant;
  sol.dual_value = -wk.b.dot(y) + p.constant;
  sol.gap = sol.dual_value - sol.primal_value;
  const RVec rp = wk.b - apply_a(wk, x);
  sol.primal_residual = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
  const Blocks aty = apply_at(wk, y);
  double dres = 0.0;
  for (std::size_t k = 0; k < nb; ++k) dres = std::max(dres, max_abs(wk.c[k] - aty[k] - s[k]));
  sol.dual_residual = dres;

  // Report the dual for the original (unreduced) constraint list.
  if (pp != &p_in) {
    RVec full = RVec::Zero(p_in.constraints.size());
    auto rr = reduce_rows(p_in);
    for (std::size_t k = 0; k < rr.kept.size(); ++k) full(rr.kept[k]) = sol.dual(k);
    sol.dual = full;
  }
  return sol;
}

void dump_problem(std::ostream& os, const SdpProblem& p) {
  os << std::setprecision(17);
  os << "blocks " << p.block_sizes.size() << '\n';
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) {
    os << "block " << p.block_names[b] << ' ' << p.block_sizes[b] << '\n';
    const auto& c = p.objective[b];
    for (Index i = 0; i < c.rows(); ++i) {
      for (Index j = 0; j < c.cols(); ++j)
        os << (j ? " " : "") << c(i, j).real() << ',' << c(i, j).imag();
      os << '\n';
    }
  }
  os << "constant " << p.constant << '\n';
  os << "constraints " << p.constraints.size() << '\n';
  for (const auto& con : p.constraints) {
    os << "row rhs " << con.rhs << " tag " << (con.tag.empty() ? "-" : con.tag) << '\n';
    for (const auto& t : con.terms)
      for (const auto& e : t.entries)
        os << "  " << t.block << ' ' << e.row << ' ' << e.col << ' ' << e.value.real() << ','
           << e.value.imag() << '\n';
  }
}

void dump_solution(std::ostream& os, const SdpSolution& s) {
  os << std::setprecision(17);
  os << "status " << to_string(s.status) << '\n';
  os << "iterations " << s.iterations << '\n';
  os << "primal_value " << s.primal_value << '\n';
  os << "dual_value " << s.dual_value << '\n';
  os << "gap " << s.gap << '\n';
  os << "primal_residual " << s.primal_residual << '\n';
  os << "dual_residual " << s.dual_residual << '\n';
  os << "dual";
  for (Index i = 0; i < s.dual.size(); ++i) os << ' ' << s.dual(i);
  os << '\n';
  for (std::size_t b = 0; b < s.primal.size(); ++b) {
    os << "X " << b << ' ' << s.primal[b].rows() << '\n';
    for (Index i = 0; i < s.primal[b].rows(); ++i) {
      for (Index j = 0; j < s.primal[b].cols(); ++j)
        os << (j ? " " : "") << s.primal[b](i, j).real() << ',' << s.primal[b](i, j).imag();
      os << '\n';
    }
  }
}

}  // namespace qcomb

namespace qcomb {

ExplicitDual explicit_dual(const SdpProblem& p, double tol) {
  validate(p);
  const RMat a = constraint_matrix(p);
  RVec b(a.rows());
  for (Index i = 0; i < a.rows(); ++i) b(i) = p.constraints[i].rhs;
  const auto off = block_offsets(p);
  const Index nv = off.back();

  // x0: least-norm solution in coordinates; null space of A spans the
  // directions orthogonal to every A_i.
  Eigen::CompleteOrthogonalDecomposition<RMat> cod(a);
  cod.setThreshold(tol);
  const RVec x0 = cod.solve(b);
  if ((a * x0 - b).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()))
    throw InvariantError("explicit_dual: equality system has no solution");
  Eigen::FullPivLU<RMat> lu(a);
  lu.setThreshold(tol);
  const RMat null = lu.kernel();

  ExplicitDual d;
  d.problem.block_names = p.block_names;
  d.problem.block_sizes = p.block_sizes;
  double x0_obj = p.constant;
  for (std::size_t k = 0; k < p.block_sizes.size(); ++k) {
    const int n = p.block_sizes[k];
    const CMat xk = from_coord_vector(x0.segment(off[k], Index(n) * n), n);
    d.problem.objective.push_back(-0.5 * (xk + xk.adjoint()));
    x0_obj += (xk * p.objective[k]).trace().real();
  }
  d.offset = x0_obj;
  if (lu.rank() < nv) {
    for (Index c = 0; c < null.cols(); ++c) {
      LinearConstraint con;
      double rhs = 0.0;
      for (std::size_t k = 0; k < p.block_sizes.size(); ++k) {
        const int n = p.block_sizes[k];
        const CMat z = from_coord_vector(null.col(c).segment(off[k], Index(n) * n), n);
        rhs -= (z * p.objective[k]).trace().real();
        if (max_abs(z) < 1e-14) continue;
        con.terms.push_back(dense_term(static_cast<int>(k), z));
      }
      con.rhs = rhs;
      d.problem.constraints.push_back(std::move(con));
    }
  }
  return d;
}

}  // namespace qcomb
