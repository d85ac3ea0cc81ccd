#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qcomb/compile.hpp"
#include "qcomb/haar.hpp"

namespace qcomb {

double baseline_fidelity(double gamma);      // 1 - 3 gamma / 4
double optimal_fidelity_3slot(double gamma);  // closed form, gamma in [0, 1]

struct StageResult {
  std::string stage;
  double value = 0.0;  // in units of tr[C Omega_offset] = 4 (F - baseline)
  SdpStatus status = SdpStatus::optimal;
  double gap = 0.0;
};

struct NoGoReport {
  double gamma = 0.0;
  double baseline = 0.0;
  double full_ico_optimum = 0.0;  // fidelity
  SdpStatus full_status = SdpStatus::optimal;
  std::vector<StageResult> chain;
  double m_eigenvalue = 0.0;
  Eigen::Vector2d m_eigenvector = Eigen::Vector2d::Zero();
  Eigen::Vector2d optimal_point = Eigen::Vector2d::Zero();  // (sqrt H011, sqrt H033)
  double improvement = 0.0;   // largest fidelity gain over baseline seen anywhere
  double chain_spread = 0.0;  // max - min over the chain values
  bool passed = false;
  std::string failure;
};

// Full 64x64 ICO SDP with the Haar fidelity operator, the reduced block SDP,
// each hand-reduced stage, and the eigen-decomposition of M.
NoGoReport verify_nogo(double gamma, double tol = 1e-6, const SdpOptions& opt = {});

// The 2x2 matrix M of the last reduction stage.
Eigen::Matrix2d nogo_matrix(double gamma);

struct DualCertificate {
  std::array<double, 12> y{};  // y[1..11]; y[0] holds y00
  double objective = 0.0;      // (4/3) y3 + (4/3) y4 + (8/3) y5
  std::array<double, 3> eig0{};  // declared eigenvalues of Y0 - Omega0
  std::array<double, 3> eig1{};  // and of Y1 - Omega1
  CMat y0, y1;                   // the parameterized matrices
};
DualCertificate dual_certificate_values(double gamma);

struct ThreeSlotReport {
  double gamma = 0.0;
  double reduced_primal = 0.0;
  SdpStatus primal_status = SdpStatus::optimal;
  double dual_value = 0.0;
  SdpStatus dual_status = SdpStatus::optimal;
  std::vector<double> dual_eigen_margins;  // min eigenvalue of each slack block
  double formula = 0.0;
  double certificate = 0.0;
  double circuit_fidelity = 0.0;
  double circuit_variance = 0.0;
  double baseline = 0.0;
  double delta = 0.0;
  bool passed = false;
  std::string failure;
};

ThreeSlotReport verify_3slot(double gamma, double tol = 1e-6, int samples = 100,
                             std::uint64_t seed = 7, const SdpOptions& opt = {});

// Built once per process.
const CompiledSystem& nogo_reduced_system();       // n=2 ICO, block form
const CompiledSystem& three_slot_reduced_system();  // n=3 sequential + S3
const CompiledSystem& full_system(StrategyKind kind, int n);

struct GateSetRow {
  double gamma = 0.0;
  std::vector<StrategyKind> kinds;
  std::vector<double> values;
  std::vector<SdpStatus> status;
  double baseline = 0.0;
};

std::vector<GateSetRow> gate_set_experiment(const std::vector<double>& gammas,
                                            const std::vector<Mat2>& gates,
                                            const std::vector<StrategyKind>& kinds,
                                            const SdpOptions& opt = {});

}  // namespace qcomb
