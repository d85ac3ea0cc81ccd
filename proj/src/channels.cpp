#include "qcomb/channels.hpp"

#include <cmath>
#include <set>

namespace qcomb {

NoiseModel::NoiseModel(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw DomainError("noise parameter gamma must lie in [0, 1]");
}

ChannelChoi::ChannelChoi(LabeledOperator op, std::string output, std::string input)
    : output_(std::move(output)), input_(std::move(input)) {
  if (op.systems().size() != 2 || !op.has(output_) || !op.has(input_) || output_ == input_)
    throw LabelError("ChannelChoi: operator must act on exactly (" + output_ + ", " +
                     input_ + ")");
  op_ = permute_systems(op, {output_, input_});
  const double scale = std::max(1.0, max_abs(op_.matrix()));
  auto psd = check_psd(op_, 1e-10 * scale);
  if (!psd.psd)
    throw InvariantError("ChannelChoi: Choi operator is not PSD (min eigenvalue " +
                         std::to_string(psd.min_eigenvalue) + ")");
  auto marginal = partial_trace(op_, {output_}).matrix();
  if (max_abs(marginal - CMat::Identity(marginal.rows(), marginal.cols())) > 1e-10 * scale)
    throw InvariantError("ChannelChoi: channel is not trace preserving");
}

ChannelChoi ChannelChoi::relabeled(const std::string& output, const std::string& input) const {
  return {op_.relabeled({{output_, "\x01out"}, {input_, "\x01in"}})
              .relabeled({{"\x01out", output}, {"\x01in", input}}),
          output, input};
}

CVec choi_vector(const CMat& u) {
  CVec v(u.rows() * u.cols());
  for (Index o = 0; o < u.rows(); ++o)
    for (Index i = 0; i < u.cols(); ++i) v(o * u.cols() + i) = u(o, i);
  return v;
}

bool is_unitary(const CMat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - CMat::Identity(u.cols(), u.cols())) < tol;
}

ChannelChoi choi_of_unitary(const CMat& u, const std::string& output, const std::string& input) {
  if (!is_unitary(u)) throw InvariantError("choi_of_unitary: input is not unitary");
  CVec v = choi_vector(u);
  const int d = static_cast<int>(u.rows());
  return {LabeledOperator({{output, d}, {input, d}}, v * v.adjoint()), output, input};
}

ChannelChoi depolarizing_choi(const NoiseModel& noise, const std::string& output,
                              const std::string& input) {
  const double g = noise.gamma();
  CVec v = choi_vector(CMat::Identity(2, 2));
  CMat j = (1.0 - g) * (v * v.adjoint()) + (g / 2.0) * CMat::Identity(4, 4);
  return {LabeledOperator(qubits({output, input}), j), output, input};
}

ChannelChoi compose(const ChannelChoi& first, const ChannelChoi& second) {
  if (first.output_dim() != second.input_dim())
    throw DimensionError("compose: output of the first channel does not match the second");
  const std::string mid = "\x01mid";
  auto a = first.op().relabeled({{first.output(), mid}, {first.input(), "\x01in"}});
  auto b = second.op().relabeled({{second.output(), "\x01out"}, {second.input(), mid}});
  auto j = link_product(b, a).relabeled({{"\x01out", second.output()}, {"\x01in", first.input()}});
  return {j, second.output(), first.input()};
}

ChannelChoi noisy_unitary_choi(const CMat& u, const NoiseModel& noise, const std::string& output,
                               const std::string& input) {
  return compose(choi_of_unitary(u, output, input), depolarizing_choi(noise, output, input));
}

double channel_fidelity(const ChannelChoi& j, const CMat& u) {
  if (!is_unitary(u)) throw InvariantError("channel_fidelity: target is not unitary");
  if (u.rows() != j.output_dim() || u.cols() != j.input_dim())
    throw DimensionError("channel_fidelity: target size does not match the channel");
  CVec v = choi_vector(u);
  const double d = static_cast<double>(u.rows());
  return (v.adjoint() * j.op().matrix() * v)(0, 0).real() / (d * d);
}

ChannelChoi effective_channel(const LabeledOperator& strategy, const ChannelChoi& noisy, int n) {
  if (n < 1) throw DomainError("effective_channel: need at least one slot");
  auto expected = strategy_names(n);
  std::set<std::string> want(expected.begin(), expected.end());
  auto got_names = strategy.names();
  std::set<std::string> got(got_names.begin(), got_names.end());
  if (want != got || got_names.size() != expected.size())
    throw LabelError("effective_channel: strategy does not act on P I^n O^n F");
  auto slots = noisy.relabeled("O1", "I1").op();
  for (int k = 2; k <= n; ++k) {
    auto kk = std::to_string(k);
    slots = tensor(slots, noisy.relabeled("O" + kk, "I" + kk).op());
  }
  return {link_product(strategy, slots), "F", "P"};
}

std::vector<CMat> depolarizing_kraus(const NoiseModel& noise) {
  const double g = noise.gamma();
  return {std::sqrt(1.0 - 3.0 * g / 4.0) * CMat(paulis::I()),
          std::sqrt(g / 4.0) * CMat(paulis::X()), std::sqrt(g / 4.0) * CMat(paulis::Y()),
          std::sqrt(g / 4.0) * CMat(paulis::Z())};
}

void check_kraus_complete(const std::vector<CMat>& kraus, double tol) {
  if (kraus.empty()) throw DimensionError("Kraus family is empty");
  const Index din = kraus.front().cols();
  CMat acc = CMat::Zero(din, din);
  for (const auto& k : kraus) {
    if (k.cols() != din) throw DimensionError("Kraus operators have different input sizes");
    acc += k.adjoint() * k;
  }
  if (max_abs(acc - CMat::Identity(din, din)) > tol)
    throw InvariantError("Kraus family violates completeness");
}

CMat apply_kraus(const std::vector<CMat>& kraus, const CMat& rho) {
  check_kraus_complete(kraus);
  if (rho.rows() != kraus.front().cols() || rho.cols() != rho.rows())
    throw DimensionError("apply_kraus: state size does not match the Kraus input");
  CMat out = CMat::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

ChannelChoi choi_from_kraus(const std::vector<CMat>& kraus, const std::string& output,
                            const std::string& input) {
  check_kraus_complete(kraus);
  const int dout = static_cast<int>(kraus.front().rows());
  const int din = static_cast<int>(kraus.front().cols());
  CMat j = CMat::Zero(dout * din, dout * din);
  for (const auto& k : kraus) {
    CVec v = choi_vector(k);
    j.noalias() += v * v.adjoint();
  }
  return {LabeledOperator({{output, dout}, {input, din}}, j), output, input};
}

CMat haar_unitary(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat z(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) z(i, j) = cplx(normal(rng), normal(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    cplx rk = r(k, k);
    q.col(k) *= rk / std::abs(rk);
  }
  return q;
}

namespace paulis {
Mat2 I() { return Mat2::Identity(); }
Mat2 X() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
Mat2 Y() {
  Mat2 m;
  m << 0, -I_UNIT, I_UNIT, 0;
  return m;
}
Mat2 Z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}
Mat2 H() {
  Mat2 m;
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}
Mat2 S() {
  Mat2 m;
  m << 1, 0, 0, I_UNIT;
  return m;
}
}  // namespace paulis

}  // namespace qcomb
