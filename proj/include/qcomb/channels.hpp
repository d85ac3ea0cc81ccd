#pragma once

#include <random>
#include <string>
#include <vector>

#include "qcomb/tensor.hpp"

namespace qcomb {

class NoiseModel {
 public:
  explicit NoiseModel(double gamma);
  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

// Choi operator on (output, input), |I>> = sum_i |ii>.
class ChannelChoi {
 public:
  // Validates PSD and trace preservation at 1e-10.
  ChannelChoi(LabeledOperator op, std::string output, std::string input);

  const LabeledOperator& op() const { return op_; }
  const std::string& output() const { return output_; }
  const std::string& input() const { return input_; }
  int output_dim() const { return op_.dim_of(output_); }
  int input_dim() const { return op_.dim_of(input_); }

  ChannelChoi relabeled(const std::string& output, const std::string& input) const;

 private:
  LabeledOperator op_;
  std::string output_, input_;
};

CVec choi_vector(const CMat& u);  // (U (x) 1)|I>>
bool is_unitary(const CMat& u, double tol = 1e-10);

ChannelChoi choi_of_unitary(const CMat& u, const std::string& output = "O",
                            const std::string& input = "I");
ChannelChoi depolarizing_choi(const NoiseModel& noise, const std::string& output = "O",
                              const std::string& input = "I");
// second o first
ChannelChoi compose(const ChannelChoi& first, const ChannelChoi& second);
// N_gamma o U
ChannelChoi noisy_unitary_choi(const CMat& u, const NoiseModel& noise,
                               const std::string& output = "O",
                               const std::string& input = "I");

double channel_fidelity(const ChannelChoi& j, const CMat& u);

// C * (J^{N o U})^{(x) n}; slot k wires the channel's input to I_k and output to O_k.
ChannelChoi effective_channel(const LabeledOperator& strategy, const ChannelChoi& noisy, int n);

std::vector<CMat> depolarizing_kraus(const NoiseModel& noise);
void check_kraus_complete(const std::vector<CMat>& kraus, double tol = 1e-10);
CMat apply_kraus(const std::vector<CMat>& kraus, const CMat& rho);
ChannelChoi choi_from_kraus(const std::vector<CMat>& kraus, const std::string& output = "O",
                            const std::string& input = "I");

// Haar-random unitary via the normal-QR construction.
CMat haar_unitary(std::mt19937_64& rng, int d = 2);

namespace paulis {
Mat2 I();
Mat2 X();
Mat2 Y();
Mat2 Z();
Mat2 H();
Mat2 S();
}  // namespace paulis

}  // namespace qcomb
