#include "qcomb/kernels.hpp"

#include <numeric>

namespace qcomb::kernels {

namespace {

std::vector<Index> strides_of(const std::vector<int>& dims) {
  std::vector<Index> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
    s[k] = s[k + 1] * dims[k + 1];
  return s;
}

// All indices spanned by the chosen factors, laid out big-endian over them,
// expressed as offsets in the full index space.
std::vector<Index> offsets_over(const std::vector<int>& dims,
                                const std::vector<int>& factors) {
  auto strides = strides_of(dims);
  std::vector<Index> out{0};
  for (int f : factors) {
    std::vector<Index> next;
    next.reserve(out.size() * dims[f]);
    for (Index base : out)
      for (int v = 0; v < dims[f]; ++v) next.push_back(base + v * strides[f]);
    out.swap(next);
  }
  return out;
}

}  // namespace

std::vector<Index> permutation_map(const std::vector<int>& dims,
                                   const std::vector<int>& order) {
  return offsets_over(dims, order);
}

CMat gather_serial(const CMat& in, const std::vector<Index>& map) {
  const Index n = static_cast<Index>(map.size());
  CMat out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = in(map[i], map[j]);
  return out;
}

CMat gather_omp(const CMat& in, const std::vector<Index>& map) {
  const Index n = static_cast<Index>(map.size());
  CMat out(n, n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = in(map[i], map[j]);
  return out;
}

namespace {

void split_factors(const std::vector<int>& dims, const std::vector<bool>& traced,
                   std::vector<int>& keep, std::vector<int>& gone) {
  if (traced.size() != dims.size())
    throw DimensionError("partial_trace: flag count does not match factor count");
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    (traced[k] ? gone : keep).push_back(k);
}

}  // namespace

CMat partial_trace_serial(const CMat& in, const std::vector<int>& dims,
                          const std::vector<bool>& traced) {
  std::vector<int> keep, gone;
  split_factors(dims, traced, keep, gone);
  auto ko = offsets_over(dims, keep);
  auto to = offsets_over(dims, gone);
  const Index n = static_cast<Index>(ko.size());
  CMat out(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) {
      cplx acc = 0;
      for (Index t : to) acc += in(ko[r] + t, ko[c] + t);
      out(r, c) = acc;
    }
  return out;
}

CMat partial_trace_omp(const CMat& in, const std::vector<int>& dims,
                       const std::vector<bool>& traced) {
  std::vector<int> keep, gone;
  split_factors(dims, traced, keep, gone);
  auto ko = offsets_over(dims, keep);
  auto to = offsets_over(dims, gone);
  const Index n = static_cast<Index>(ko.size());
  CMat out(n, n);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) {
      cplx acc = 0;
      for (Index t : to) acc += in(ko[r] + t, ko[c] + t);
      out(r, c) = acc;
    }
  return out;
}

CMat weighted_sum_serial(std::size_t count, const std::vector<double>& weights,
                         const TermFn& term, Index rows, Index cols) {
  CMat acc = CMat::Zero(rows, cols);
  for (std::size_t k = 0; k < count; ++k) acc += weights[k] * term(k);
  return acc;
}

CMat weighted_sum_omp(std::size_t count, const std::vector<double>& weights,
                      const TermFn& term, Index rows, Index cols) {
  const std::size_t chunks = (count + kReductionChunk - 1) / kReductionChunk;
  std::vector<CMat> partial(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < chunks; ++c) {
    CMat acc = CMat::Zero(rows, cols);
    const std::size_t end = std::min(count, (c + 1) * kReductionChunk);
    for (std::size_t k = c * kReductionChunk; k < end; ++k)
      acc += weights[k] * term(k);
    partial[c] = std::move(acc);
  }
  CMat total = CMat::Zero(rows, cols);
  for (auto& p : partial) total += p;
  return total;
}

CMat gather(const CMat& in, const std::vector<Index>& map) {
  return in.rows() >= kParallelThreshold ? gather_omp(in, map)
                                         : gather_serial(in, map);
}

CMat partial_trace(const CMat& in, const std::vector<int>& dims,
                   const std::vector<bool>& traced) {
  return in.rows() >= kParallelThreshold ? partial_trace_omp(in, dims, traced)
                                         : partial_trace_serial(in, dims, traced);
}

}  // namespace qcomb::kernels
