#include "qcomb/tensor.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "qcomb/kernels.hpp"

namespace qcomb {

std::vector<SystemLabel> qubits(const std::vector<std::string>& names) {
  std::vector<SystemLabel> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back({n, 2});
  return out;
}

LabeledOperator::LabeledOperator(std::vector<SystemLabel> systems, CMat matrix)
    : systems_(std::move(systems)), matrix_(std::move(matrix)) {
  Index total = 1;
  std::set<std::string> seen;
  for (const auto& s : systems_) {
    if (s.dim < 1) throw DimensionError("system '" + s.name + "' has dim < 1");
    if (!seen.insert(s.name).second)
      throw LabelError("duplicate system label '" + s.name + "'");
    total *= s.dim;
  }
  if (matrix_.rows() != total || matrix_.cols() != total)
    throw DimensionError("matrix is " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()) + ", systems need " +
                         std::to_string(total));
}

LabeledOperator LabeledOperator::identity(std::vector<SystemLabel> systems) {
  Index total = 1;
  for (const auto& s : systems) total *= s.dim;
  return {std::move(systems), CMat::Identity(total, total)};
}

LabeledOperator LabeledOperator::scalar(cplx value) {
  CMat m(1, 1);
  m(0, 0) = value;
  return {{}, m};
}

std::vector<std::string> LabeledOperator::names() const {
  std::vector<std::string> out;
  for (const auto& s : systems_) out.push_back(s.name);
  return out;
}

std::vector<int> LabeledOperator::dims() const {
  std::vector<int> out;
  for (const auto& s : systems_) out.push_back(s.dim);
  return out;
}

int LabeledOperator::position(std::string_view name) const {
  for (std::size_t k = 0; k < systems_.size(); ++k)
    if (systems_[k].name == name) return static_cast<int>(k);
  return -1;
}

int LabeledOperator::dim_of(std::string_view name) const {
  int p = position(name);
  if (p < 0) throw LabelError("unknown system '" + std::string(name) + "'");
  return systems_[p].dim;
}

LabeledOperator LabeledOperator::relabeled(
    const std::vector<std::pair<std::string, std::string>>& renames) const {
  auto sys = systems_;
  for (const auto& [from, to] : renames) {
    int p = position(from);
    if (p < 0) throw LabelError("relabel: unknown system '" + from + "'");
    sys[p].name = to;
  }
  return {std::move(sys), matrix_};
}

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b) {
  for (const auto& s : b.systems())
    if (a.has(s.name)) throw LabelError("tensor: label collision on '" + s.name + "'");
  auto sys = a.systems();
  sys.insert(sys.end(), b.systems().begin(), b.systems().end());
  CMat m(a.dim() * b.dim(), a.dim() * b.dim());
  const CMat& A = a.matrix();
  const CMat& B = b.matrix();
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      m.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return {std::move(sys), std::move(m)};
}

namespace {

std::vector<int> positions_of(const LabeledOperator& a,
                              const std::vector<std::string>& names,
                              const char* op) {
  std::vector<int> out;
  std::set<std::string> seen;
  for (const auto& n : names) {
    int p = a.position(n);
    if (p < 0) throw LabelError(std::string(op) + ": unknown system '" + n + "'");
    if (!seen.insert(n).second)
      throw LabelError(std::string(op) + ": repeated system '" + n + "'");
    out.push_back(p);
  }
  return out;
}

}  // namespace

LabeledOperator permute_systems(const LabeledOperator& a,
                                const std::vector<std::string>& order) {
  if (order.size() != a.systems().size())
    throw LabelError("permute_systems: order is not a permutation of the systems");
  auto pos = positions_of(a, order, "permute_systems");
  bool same = true;
  for (std::size_t k = 0; k < pos.size(); ++k) same = same && pos[k] == static_cast<int>(k);
  if (same) return a;
  std::vector<SystemLabel> sys;
  for (int p : pos) sys.push_back(a.systems()[p]);
  auto map = kernels::permutation_map(a.dims(), pos);
  return {std::move(sys), kernels::gather(a.matrix(), map)};
}

LabeledOperator partial_trace(const LabeledOperator& a,
                              const std::vector<std::string>& over) {
  auto pos = positions_of(a, over, "partial_trace");
  std::vector<bool> traced(a.systems().size(), false);
  for (int p : pos) traced[p] = true;
  std::vector<SystemLabel> keep;
  for (std::size_t k = 0; k < traced.size(); ++k)
    if (!traced[k]) keep.push_back(a.systems()[k]);
  return {std::move(keep), kernels::partial_trace(a.matrix(), a.dims(), traced)};
}

LabeledOperator trace_and_replace(const LabeledOperator& a,
                                  const std::vector<std::string>& x) {
  if (x.empty()) return a;
  auto reduced = partial_trace(a, x);
  std::vector<SystemLabel> xs;
  int dx = 1;
  for (const auto& n : x) {
    xs.push_back({n, a.dim_of(n)});
    dx *= a.dim_of(n);
  }
  auto filled = tensor(reduced, (1.0 / dx) * LabeledOperator::identity(xs));
  return permute_systems(filled, a.names());
}

LabeledOperator partial_transpose(const LabeledOperator& a,
                                  const std::vector<std::string>& over) {
  auto pos = positions_of(a, over, "partial_transpose");
  auto dims = a.dims();
  const int k = static_cast<int>(dims.size());
  std::vector<Index> strides(k, 1);
  for (int i = k - 2; i >= 0; --i) strides[i] = strides[i + 1] * dims[i + 1];
  const Index n = a.dim();
  CMat out(n, n);
  const CMat& m = a.matrix();
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) {
      Index rr = r, cc = c;
      for (int p : pos) {
        Index dr = (r / strides[p]) % dims[p];
        Index dc = (c / strides[p]) % dims[p];
        rr += (dc - dr) * strides[p];
        cc += (dr - dc) * strides[p];
      }
      out(rr, cc) = m(r, c);
    }
  return a.with_matrix(std::move(out));
}

LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b) {
  std::vector<std::string> xs, ss, ys;
  for (const auto& s : a.systems()) {
    int q = b.position(s.name);
    if (q < 0) {
      xs.push_back(s.name);
      continue;
    }
    if (b.systems()[q].dim != s.dim)
      throw DimensionError("link_product: dimension mismatch on '" + s.name + "'");
    ss.push_back(s.name);
  }
  for (const auto& s : b.systems())
    if (!a.has(s.name)) ys.push_back(s.name);

  std::vector<std::string> a_order = xs, b_order = ss;
  a_order.insert(a_order.end(), ss.begin(), ss.end());
  b_order.insert(b_order.end(), ys.begin(), ys.end());
  const CMat A = permute_systems(a, a_order).matrix();
  const CMat B = permute_systems(b, b_order).matrix();

  Index dx = 1, ds = 1, dy = 1;
  for (const auto& n : xs) dx *= a.dim_of(n);
  for (const auto& n : ss) ds *= a.dim_of(n);
  for (const auto& n : ys) dy *= b.dim_of(n);

  // The partial transpose on S followed by the trace over S collapses to a
  // plain contraction: out[(x,y),(x',y')] = sum a[(x,s),(x',t)] b[(s,y),(t,y')].
  CMat Ab(dx * dx, ds * ds), Bb(ds * ds, dy * dy);
  for (Index x = 0; x < dx; ++x)
    for (Index xp = 0; xp < dx; ++xp)
      for (Index s = 0; s < ds; ++s)
        for (Index t = 0; t < ds; ++t) Ab(x * dx + xp, s * ds + t) = A(x * ds + s, xp * ds + t);
  for (Index s = 0; s < ds; ++s)
    for (Index t = 0; t < ds; ++t)
      for (Index y = 0; y < dy; ++y)
        for (Index yp = 0; yp < dy; ++yp) Bb(s * ds + t, y * dy + yp) = B(s * dy + y, t * dy + yp);
  const CMat R = Ab * Bb;

  CMat out(dx * dy, dx * dy);
  for (Index x = 0; x < dx; ++x)
    for (Index xp = 0; xp < dx; ++xp)
      for (Index y = 0; y < dy; ++y)
        for (Index yp = 0; yp < dy; ++yp) out(x * dy + y, xp * dy + yp) = R(x * dx + xp, y * dy + yp);

  std::vector<SystemLabel> sys;
  for (const auto& n : xs) sys.push_back({n, a.dim_of(n)});
  for (const auto& n : ys) sys.push_back({n, b.dim_of(n)});
  return {std::move(sys), std::move(out)};
}

namespace {

void require_same_set(const LabeledOperator& a, const LabeledOperator& b, const char* op) {
  if (a.systems().size() != b.systems().size())
    throw LabelError(std::string(op) + ": operands act on different systems");
  for (const auto& s : a.systems()) {
    int q = b.position(s.name);
    if (q < 0 || b.systems()[q].dim != s.dim)
      throw LabelError(std::string(op) + ": operands act on different systems");
  }
}

}  // namespace

LabeledOperator operator+(const LabeledOperator& a, const LabeledOperator& b) {
  require_same_set(a, b, "operator+");
  return a.with_matrix(a.matrix() + permute_systems(b, a.names()).matrix());
}

LabeledOperator operator-(const LabeledOperator& a, const LabeledOperator& b) {
  require_same_set(a, b, "operator-");
  return a.with_matrix(a.matrix() - permute_systems(b, a.names()).matrix());
}

LabeledOperator operator*(cplx s, const LabeledOperator& a) {
  return a.with_matrix(s * a.matrix());
}

namespace {

int trailing_number(const std::string& s) {
  int v = -1;
  auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return -1;
  return v;
}

std::tuple<int, int, std::string> rank_of(const std::string& name) {
  if (name == "P") return {0, 0, name};
  if (name == "F") return {2, 0, name};
  if (name.size() > 1) {
    int k = trailing_number(name);
    if (k >= 1 && name[0] == 'I') return {1, 2 * k - 1, name};
    if (k >= 1 && name[0] == 'O') return {1, 2 * k, name};
    if (k >= 1 && name[0] == 'A') return {3, k, name};
  }
  return {4, 0, name};
}

}  // namespace

std::vector<std::string> canonical_order(std::vector<std::string> names) {
  std::stable_sort(names.begin(), names.end(), [](const auto& x, const auto& y) {
    return rank_of(x) < rank_of(y);
  });
  return names;
}

LabeledOperator to_canonical(const LabeledOperator& a) {
  return permute_systems(a, canonical_order(a.names()));
}

std::vector<std::string> strategy_names(int n) {
  std::vector<std::string> out{"P"};
  for (int k = 1; k <= n; ++k) {
    out.push_back("I" + std::to_string(k));
    out.push_back("O" + std::to_string(k));
  }
  out.push_back("F");
  return out;
}

bool is_hermitian(const CMat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) <= tol * scale;
}

PsdReport check_psd(const CMat& m, double tol) {
  if (!is_hermitian(m)) throw InvariantError("check_psd: operator is not Hermitian");
  if (m.size() == 0) return {true, 0.0};
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return {lo > -tol, lo};
}

PsdReport check_psd(const LabeledOperator& a, double tol) {
  return check_psd(a.matrix(), tol);
}

double distance(const LabeledOperator& a, const LabeledOperator& b) {
  require_same_set(a, b, "distance");
  return max_abs(a.matrix() - permute_systems(b, a.names()).matrix());
}

}  // namespace qcomb
