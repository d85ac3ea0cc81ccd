#pragma once

// Index-shuffling and reduction kernels behind the labeled-operator algebra.
// Every kernel has a plain serial version (the reference) and an OpenMP
// version; both produce bitwise-identical results for the gather/trace
// kernels, and the chunked reduction is independent of the thread count.

#include <functional>
#include <vector>

#include "qcomb/types.hpp"

namespace qcomb::kernels {

// map[new_index] = old_index for reordering tensor factors.
// dims are big-endian subsystem dimensions, order[t] = old factor placed at t.
std::vector<Index> permutation_map(const std::vector<int>& dims,
                                   const std::vector<int>& order);

// out(i, j) = in(map[i], map[j])
CMat gather_serial(const CMat& in, const std::vector<Index>& map);
CMat gather_omp(const CMat& in, const std::vector<Index>& map);

// Trace out the factors flagged in `traced`.
CMat partial_trace_serial(const CMat& in, const std::vector<int>& dims,
                          const std::vector<bool>& traced);
CMat partial_trace_omp(const CMat& in, const std::vector<int>& dims,
                       const std::vector<bool>& traced);

// sum_k weights[k] * term(k), terms of shape rows x cols.
using TermFn = std::function<CMat(std::size_t)>;
CMat weighted_sum_serial(std::size_t count, const std::vector<double>& weights,
                         const TermFn& term, Index rows, Index cols);
// Fixed-size chunks summed in order, so the result does not depend on how
// many threads ran.
CMat weighted_sum_omp(std::size_t count, const std::vector<double>& weights,
                      const TermFn& term, Index rows, Index cols);

inline constexpr std::size_t kReductionChunk = 8;

// Matrices at least this large go through the OpenMP kernels.
inline constexpr Index kParallelThreshold = 64;

CMat gather(const CMat& in, const std::vector<Index>& map);
CMat partial_trace(const CMat& in, const std::vector<int>& dims,
                   const std::vector<bool>& traced);

}  // namespace qcomb::kernels
