#pragma once

#include <random>
#include <string>
#include <vector>

#include "qcomb/tensor.hpp"

namespace qtest {

using namespace qcomb;

inline CMat random_complex(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> g;
  CMat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

inline CMat random_hermitian(std::mt19937_64& rng, Index d) {
  CMat a = random_complex(rng, d, d);
  return (a + a.adjoint()) / 2.0;
}

inline CMat random_psd(std::mt19937_64& rng, Index d) {
  CMat a = random_complex(rng, d, d);
  return a * a.adjoint();
}

inline std::vector<SystemLabel> labels(const std::vector<std::string>& names,
                                       const std::vector<int>& dims) {
  std::vector<SystemLabel> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back({names[i], dims[i]});
  return out;
}

inline LabeledOperator random_op(std::mt19937_64& rng, const std::vector<std::string>& names,
                                 const std::vector<int>& dims) {
  Index d = 1;
  for (int x : dims) d *= x;
  return {labels(names, dims), random_complex(rng, d, d)};
}

// Oracle helpers written with plain index loops, independent of the kernels.

inline CMat naive_kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline std::vector<int> digits(Index x, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int k = int(dims.size()) - 1; k >= 0; --k) {
    d[k] = int(x % dims[k]);
    x /= dims[k];
  }
  return d;
}

inline Index undigits(const std::vector<int>& d, const std::vector<int>& dims) {
  Index x = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) x = x * dims[k] + d[k];
  return x;
}

// Trace out factors flagged in `traced`, by brute force over all index pairs.
inline CMat naive_partial_trace(const CMat& m, const std::vector<int>& dims,
                                const std::vector<bool>& traced) {
  std::vector<int> kept_dims;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!traced[k]) kept_dims.push_back(dims[k]);
  Index kd = 1;
  for (int x : kept_dims) kd *= x;
  CMat out = CMat::Zero(kd, kd);
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      auto dr = digits(r, dims), dc = digits(c, dims);
      bool diag = true;
      std::vector<int> kr, kc;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (traced[k]) {
          if (dr[k] != dc[k]) diag = false;
        } else {
          kr.push_back(dr[k]);
          kc.push_back(dc[k]);
        }
      }
      if (diag) out(undigits(kr, kept_dims), undigits(kc, kept_dims)) += m(r, c);
    }
  return out;
}

}  // namespace qtest
