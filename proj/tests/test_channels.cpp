#include <random>

#include "gtest/gtest.h"
#include "qcomb/channels.hpp"
#include "support.hpp"

using namespace qcomb;
using namespace qtest;

namespace {

// Average of the entanglement fidelity straight from Kraus operators:
// F = sum_k |tr(U^dag K_k)|^2 / d^2.
double kraus_fidelity(const std::vector<CMat>& kraus, const CMat& u) {
  double f = 0;
  for (const auto& k : kraus) f += std::norm((u.adjoint() * k).trace());
  return f / double(u.rows() * u.rows());
}

}  // namespace

TEST(channels, choi_vector_layout) {
  CMat u = paulis::H();
  CVec v = choi_vector(u);
  // (U (x) 1)|I>> has entry (o, i) = U(o, i)
  for (int o = 0; o < 2; ++o)
    for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(v(o * 2 + i) - u(o, i)), 1e-15);
}

TEST(channels, baseline_fidelity_matches_kraus_oracle) {
  std::mt19937_64 rng(11);
  for (double g : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    NoiseModel n(g);
    for (int t = 0; t < 5; ++t) {
      CMat u = haar_unitary(rng);
      double f = channel_fidelity(noisy_unitary_choi(u, n), u);
      std::vector<CMat> ks;
      for (const auto& k : depolarizing_kraus(n)) ks.push_back(k * u);
      EXPECT_NEAR(f, kraus_fidelity(ks, u), 1e-13);
      EXPECT_NEAR(f, 1 - 0.75 * g, 1e-13);
    }
  }
}

TEST(channels, kraus_and_choi_agree) {
  for (double g : {0.0, 0.2, 0.9}) {
    NoiseModel n(g);
    auto ks = depolarizing_kraus(n);
    EXPECT_NO_THROW(check_kraus_complete(ks));
    EXPECT_LT(distance(choi_from_kraus(ks).op(), depolarizing_choi(n).op()), 1e-14);
    std::mt19937_64 rng(12);
    CMat rho = random_psd(rng, 2);
    rho /= rho.trace();
    CMat expect = (1 - g) * rho + g * CMat::Identity(2, 2) / 2.0;
    EXPECT_LT(max_abs(apply_kraus(ks, rho) - expect), 1e-14);
  }
  std::vector<CMat> bad{CMat::Identity(2, 2) * 0.5};
  EXPECT_THROW(check_kraus_complete(bad), InvariantError);
}

TEST(channels, domain_checks) {
  EXPECT_THROW(NoiseModel(-0.1), DomainError);
  EXPECT_THROW(NoiseModel(1.5), DomainError);
  CMat nu(2, 2);
  nu << 1, 1, 0, 1;
  EXPECT_THROW(choi_of_unitary(nu), InvariantError);
  // not trace preserving
  LabeledOperator j(qubits({"O", "I"}), 2.0 * CMat::Identity(4, 4));
  EXPECT_THROW(ChannelChoi(j, "O", "I"), InvariantError);
}

TEST(channels, composition_law) {
  // J of (second o first) equals the Kraus products' Choi
  std::mt19937_64 rng(13);
  CMat u = haar_unitary(rng), v = haar_unitary(rng);
  NoiseModel n(0.3);
  auto first = noisy_unitary_choi(u, n);
  auto second = choi_of_unitary(v);
  auto c = compose(first, second);
  std::vector<CMat> ks;
  for (const auto& k : depolarizing_kraus(n)) ks.push_back(v * k * u);
  EXPECT_LT(distance(c.op(), choi_from_kraus(ks).op()), 1e-13);
}

TEST(channels, printed_link_identities) {
  // J^N * |U>><<U| = (1 - g)|U>><<U| + g/2 I, and the full contraction with
  // |U>><<U|^T is the scalar 4 - 3g.
  std::mt19937_64 rng(14);
  for (double g : {0.1, 0.45, 0.8}) {
    CMat u = haar_unitary(rng);
    auto jn = depolarizing_choi(NoiseModel(g), "B", "A");
    CVec uv = choi_vector(u);
    LabeledOperator ju(qubits({"A", "I"}), uv * uv.adjoint());
    auto l = link_product(jn.op(), ju);
    LabeledOperator expect(qubits({"B", "I"}),
                           (1 - g) * uv * uv.adjoint() + g / 2 * CMat::Identity(4, 4));
    EXPECT_LT(distance(l, expect), 1e-13);
    LabeledOperator jt(qubits({"B", "I"}), (uv * uv.adjoint()).transpose());
    auto s = link_product(l, jt);
    ASSERT_EQ(s.dim(), 1);
    EXPECT_NEAR(s.matrix()(0, 0).real(), 4 - 3 * g, 1e-13);
    EXPECT_NEAR(s.matrix()(0, 0).imag(), 0.0, 1e-13);
  }
}

TEST(channels, haar_sampler_is_unitary_and_seeded) {
  std::mt19937_64 a(5), b(5);
  for (int d : {2, 3, 4}) {
    CMat u = haar_unitary(a, d);
    EXPECT_TRUE(is_unitary(u, 1e-12));
    EXPECT_EQ(u, haar_unitary(b, d));
  }
}

TEST(channels, haar_sampler_first_moment) {
  // E|U_00|^2 = 1/2 for Haar on U(2)
  std::mt19937_64 rng(15);
  double s = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) s += std::norm(haar_unitary(rng)(0, 0));
  EXPECT_NEAR(s / n, 0.5, 0.01);
}
