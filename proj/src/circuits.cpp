#include "qcomb/circuits.hpp"
#include "qcomb/haar.hpp"

#include <algorithm>
#include <sstream>

#include "circuit_tables.inc"

namespace qcomb {

namespace {

using SurdMat = std::vector<std::vector<Surd>>;

SurdMat parse_table(const char* text) {
  SurdMat m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<Surd> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_surd(tok));
    if (row.empty()) continue;
    if (!m.empty() && row.size() != m.front().size())
      throw InvariantError("circuit table has a ragged row");
    m.push_back(std::move(row));
  }
  return m;
}

CMat to_matrix(const SurdMat& m) {
  CMat out(m.size(), m.front().size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out(i, j) = m[i][j].value();
  return out;
}

double isometry_residual(const CMat& v) {
  return max_abs(v.adjoint() * v - CMat::Identity(v.cols(), v.cols()));
}

std::map<std::string, IsometryConstant> build_constants() {
  const std::pair<const char*, const char*> src[] = {
      {"V1", tables::kV1},   {"V2", tables::kV2},   {"V3", tables::kV3},
      {"V4", tables::kV4},   {"U4", tables::kU4},   {"U41", tables::kU41},
      {"U42", tables::kU42}, {"U43", tables::kU43}};
  const std::map<std::string, std::pair<int, int>> shape = {
      {"V1", {8, 2}},   {"V2", {16, 8}},  {"V3", {16, 16}}, {"V4", {20, 16}},
      {"U4", {20, 20}}, {"U41", {8, 8}},  {"U42", {8, 8}},  {"U43", {4, 4}}};
  std::map<std::string, IsometryConstant> out;
  for (const auto& [name, text] : src) {
    IsometryConstant c{name, parse_table(text), {}};
    c.matrix = to_matrix(c.exact);
    const auto [r, k] = shape.at(name);
    if (c.matrix.rows() != r || c.matrix.cols() != k)
      throw InvariantError(std::string("table ") + name + " has the wrong shape");
    if (isometry_residual(c.matrix) > 1e-12)
      throw InvariantError(std::string("table ") + name + " is not an isometry");
    if (r == k && isometry_residual(c.matrix.adjoint()) > 1e-12)
      throw InvariantError(std::string("table ") + name + " is not unitary");
    out.emplace(name, std::move(c));
  }
  return out;
}

}  // namespace

const std::map<std::string, IsometryConstant>& load_constants() {
  static const auto constants = [] {
    auto c = build_constants();
    std::vector<CMat> ks;
    for (int i = 0; i < 10; ++i) ks.push_back(c.at("V4").matrix.middleRows(2 * i, 2));
    check_kraus_complete(ks, 1e-12);
    return c;
  }();
  return constants;
}

std::vector<std::vector<Surd>> exact_gram(const IsometryConstant& c) {
  const std::size_t n = c.exact.front().size();
  SurdMat g(n, std::vector<Surd>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& row : c.exact) g[i][j] = g[i][j] + row[i] * row[j];  // real tables
  return g;
}

BlockPermutation u4_permutation() {
  return {{0, 2, 4, 9, 7, 13, 14, 19, 1, 3, 5, 6, 8, 10, 15, 16, 12, 11, 17, 18},
          {1, 2, 5, 6, 8, 12, 19, 15, 10, 3, 14, 7, 9, 13, 16, 4, 0, 11, 17, 18}};
}

std::vector<std::vector<Surd>> block_diag(const std::vector<SurdMat>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  SurdMat out(n, std::vector<Surd>(n));
  std::size_t at = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[at + i][at + j] = b[i][j];
    at += b.size();
  }
  return out;
}

bool permutation_matches(const SurdMat& big, const SurdMat& target, const BlockPermutation& p) {
  const std::size_t n = target.size();
  if (big.size() != n || p.rows.size() != n || p.cols.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(big[p.rows[i]][p.cols[j]] == target[i][j])) return false;
  return true;
}

namespace {

struct Search {
  const SurdMat& big;
  const SurdMat& target;
  std::size_t n;
  std::vector<int> row_of, col_of;
  std::vector<bool> row_used, col_used;

  bool consistent_col(std::size_t j, int col, std::size_t upto) const {
    for (std::size_t i = 0; i < upto; ++i)
      if (!(big[row_of[i]][col] == target[i][j])) return false;
    return true;
  }

  // assign the remaining nonzero columns of target row i
  bool assign_cols(std::size_t i, std::size_t j) {
    if (j == n) return assign_row(i + 1);
    if (col_of[j] >= 0 || target[i][j].is_zero()) return assign_cols(i, j + 1);
    for (std::size_t c = 0; c < n; ++c) {
      if (col_used[c] || !(big[row_of[i]][c] == target[i][j])) continue;
      if (!consistent_col(j, int(c), i)) continue;
      col_of[j] = int(c);
      col_used[c] = true;
      if (assign_cols(i, j + 1)) return true;
      col_of[j] = -1;
      col_used[c] = false;
    }
    return false;
  }

  bool row_fits(std::size_t i, int r) const {
    std::size_t nz_big = 0, nz_t = 0;
    for (std::size_t c = 0; c < n; ++c) nz_big += !big[r][c].is_zero();
    for (std::size_t j = 0; j < n; ++j) {
      nz_t += !target[i][j].is_zero();
      if (col_of[j] >= 0 && !(big[r][col_of[j]] == target[i][j])) return false;
    }
    return nz_big == nz_t;
  }

  bool assign_row(std::size_t i) {
    if (i == n) {
      // columns never touched by a nonzero: any leftover order works only if all zero
      std::vector<int> free_cols;
      for (std::size_t c = 0; c < n; ++c)
        if (!col_used[c]) free_cols.push_back(int(c));
      std::size_t k = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (col_of[j] < 0) col_of[j] = free_cols[k++];
      return true;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (row_used[r] || !row_fits(i, int(r))) continue;
      row_of[i] = int(r);
      row_used[r] = true;
      const auto saved = col_of;
      const auto saved_used = col_used;
      if (assign_cols(i, 0)) return true;
      col_of = saved;
      col_used = saved_used;
      row_used[r] = false;
    }
    return false;
  }
};

}  // namespace

std::optional<BlockPermutation> find_block_permutation(const SurdMat& big, const SurdMat& target) {
  const std::size_t n = target.size();
  if (big.size() != n) return std::nullopt;
  Search s{big, target, n, std::vector<int>(n, -1), std::vector<int>(n, -1),
           std::vector<bool>(n, false), std::vector<bool>(n, false)};
  if (!s.assign_row(0)) return std::nullopt;
  BlockPermutation p{s.row_of, s.col_of};
  if (!permutation_matches(big, target, p)) return std::nullopt;
  return p;
}

std::vector<CMat> v4_kraus() {
  const auto& v4 = load_constants().at("V4").matrix;
  std::vector<CMat> ks;
  for (int i = 0; i < 10; ++i) ks.push_back(v4.middleRows(2 * i, 2));
  return ks;
}

ProtocolSpec protocol_spec() {
  // the system qubit is the least significant stage qubit throughout
  return {{{"isometry", "V1", 1, 3, 0},
           {"slot", "1", 3, 3, 2},
           {"isometry", "V2", 3, 4, 0},
           {"slot", "2", 4, 4, 3},
           {"isometry", "V3", 4, 4, 0},
           {"slot", "3", 4, 4, 3},
           {"kraus", "V4", 4, 1, 0}}};
}

namespace {

CMat with_ref(const CMat& k) { return kron(k, CMat::Identity(2, 2)); }

CMat on_wire(const CMat& op, int qubits, int wire) {
  CMat out = CMat::Identity(1, 1);
  for (int q = 0; q < qubits; ++q) out = kron(out, q == wire ? op : CMat(CMat::Identity(2, 2)));
  return out;
}

void check_state(const CMat& rho, const std::string& where) {
  if (std::abs(rho.trace().real() - 2.0) > 1e-9)
    throw InvariantError("run_protocol: trace drift after " + where);
  if (!check_psd(0.5 * (rho + rho.adjoint()), 1e-9).psd)
    throw InvariantError("run_protocol: state lost positivity after " + where);
}

}  // namespace

ChannelChoi run_protocol(const CMat& u, double gamma) {
  if (!is_unitary(u)) throw DomainError("run_protocol: input is not unitary");
  const NoiseModel noise(gamma);
  const auto& c = load_constants();
  const auto dep = depolarizing_kraus(noise);
  const CVec phi = choi_vector(CMat::Identity(2, 2));
  CMat rho = phi * phi.adjoint();  // (system, reference)
  for (const auto& st : protocol_spec().stages) {
    if (st.kind == "isometry") {
      const CMat v = with_ref(c.at(st.name).matrix);
      rho = v * rho * v.adjoint();
    } else if (st.kind == "slot") {
      CMat next = CMat::Zero(rho.rows(), rho.cols());
      for (const auto& k : dep) {
        const CMat op = with_ref(on_wire(k * u, st.qubits_in, st.system_wire));
        next += op * rho * op.adjoint();
      }
      rho = std::move(next);
    } else {
      CMat next = CMat::Zero(4, 4);
      for (const auto& k : v4_kraus()) {
        const CMat op = with_ref(k);
        next += op * rho * op.adjoint();
      }
      rho = std::move(next);
    }
    check_state(rho, st.kind + " " + st.name);
  }
  return ChannelChoi(LabeledOperator(qubits({"F", "P"}), rho), "F", "P");
}

const LabeledOperator& protocol_as_strategy() {
  static const LabeledOperator comb = [] {
    const auto& c = load_constants();
    const CMat& v1 = c.at("V1").matrix;
    const CMat& v2 = c.at("V2").matrix;
    const CMat& v3 = c.at("V3").matrix;
    const auto ks = v4_kraus();
    CMat out = CMat::Zero(256, 256);
    for (const auto& k : ks) {
      CVec vec = CVec::Zero(256);
      for (int idx = 0; idx < 256; ++idx) {
        const int p = (idx >> 7) & 1, i1 = (idx >> 6) & 1, o1 = (idx >> 5) & 1,
                  i2 = (idx >> 4) & 1, o2 = (idx >> 3) & 1, i3 = (idx >> 2) & 1,
                  o3 = (idx >> 1) & 1, f = idx & 1;
        cplx acc = 0.0;
        for (int a = 0; a < 4; ++a) {
          const cplx x1 = v1(a * 2 + i1, p);
          if (x1 == 0.0) continue;
          for (int b = 0; b < 8; ++b) {
            const cplx x2 = v2(b * 2 + i2, a * 2 + o1);
            if (x2 == 0.0) continue;
            for (int cc = 0; cc < 8; ++cc) {
              const cplx x3 = v3(cc * 2 + i3, b * 2 + o2);
              if (x3 == 0.0) continue;
              acc += x1 * x2 * x3 * k(f, cc * 2 + o3);
            }
          }
        }
        vec(idx) = acc;
      }
      out += vec * vec.adjoint();
    }
    return LabeledOperator(qubits(strategy_names(3)), out);
  }();
  return comb;
}

void export_constants(std::ostream& os) {
  for (const auto& [name, c] : load_constants()) {
    os << name << ' ' << c.exact.size() << ' ' << c.exact.front().size() << '\n';
    for (const auto& row : c.exact) {
      for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j].str();
      os << '\n';
    }
  }
}

}  // namespace qcomb
