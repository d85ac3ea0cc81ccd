#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qcomb/channels.hpp"
#include "qcomb/surd.hpp"

namespace qcomb {

struct IsometryConstant {
  std::string name;
  std::vector<std::vector<Surd>> exact;
  CMat matrix;
};

// V1 (8x2), V2 (16x8), V3 (16x16), V4 (20x16), U4 (20x20), U41, U42 (8x8),
// U43 (4x4). Loaded once; throws InvariantError if any table fails its
// isometry / unitarity / Kraus-completeness check.
const std::map<std::string, IsometryConstant>& load_constants();

// Exact column Gram matrix V^dagger V of a table.
std::vector<std::vector<Surd>> exact_gram(const IsometryConstant& c);

// U4[rows[i], cols[j]] = diag(U41, U42, U43)[i, j].
struct BlockPermutation {
  std::vector<int> rows, cols;
};
BlockPermutation u4_permutation();  // the recorded one
// Backtracking search over row/column assignments, exact comparison.
std::optional<BlockPermutation> find_block_permutation(const std::vector<std::vector<Surd>>& big,
                                                       const std::vector<std::vector<Surd>>& target);
std::vector<std::vector<Surd>> block_diag(const std::vector<std::vector<std::vector<Surd>>>& blocks);
bool permutation_matches(const std::vector<std::vector<Surd>>& big,
                         const std::vector<std::vector<Surd>>& target, const BlockPermutation& p);

// Kraus slices of V4: consecutive row pairs.
std::vector<CMat> v4_kraus();

struct ProtocolStage {
  std::string kind;  // "isometry", "slot", "kraus"
  std::string name;
  int qubits_in = 0, qubits_out = 0;
  int system_wire = 0;  // slot stages: qubit receiving U and the noise
};
struct ProtocolSpec {
  std::vector<ProtocolStage> stages;
};
ProtocolSpec protocol_spec();

// Channel induced on a qubit by the protocol with U then N_gamma in each slot.
// Choi on (F, P).
ChannelChoi run_protocol(const CMat& u, double gamma);

// Comb Choi on P I1 O1 I2 O2 I3 O3 F.
const LabeledOperator& protocol_as_strategy();

void export_constants(std::ostream& os);

}  // namespace qcomb
