#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "qcomb/channels.hpp"
#include "qcomb/haar.hpp"
#include "qcomb/strategies.hpp"
#include "qcomb/symmetry.hpp"
#include "support.hpp"

using namespace qcomb;
using namespace qtest;

namespace {

double quad_mean(const QuadratureRule& q, const std::function<double(const Mat2&)>& f) {
  double s = 0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * f(q.nodes[k]);
  return s;
}

// Average channel fidelity of a comb, evaluated slot by slot with the
// quadrature nodes (no performance operator involved).
double direct_average_fidelity(const LabeledOperator& c, int n, double gamma,
                               const std::vector<Mat2>& us, const std::vector<double>& w) {
  double f = 0;
  for (std::size_t k = 0; k < us.size(); ++k) {
    CMat u = us[k];
    auto eff = effective_channel(c, noisy_unitary_choi(u, NoiseModel(gamma)), n);
    f += w[k] * channel_fidelity(eff, u);
  }
  return f;
}

}  // namespace

TEST(haar, quadrature_weights_and_unitarity) {
  for (int deg : {2, 4, 6, 8}) {
    auto q = su2_quadrature(deg);
    double s = 0;
    for (double w : q.weights) s += w;
    EXPECT_NEAR(s, 1.0, 1e-14);
    for (const auto& u : q.nodes) {
      EXPECT_LT(max_abs(u.adjoint() * u - Mat2::Identity()), 1e-14);
      EXPECT_NEAR(std::abs(u.determinant() - 1.0), 0.0, 1e-14);
    }
  }
  EXPECT_THROW(su2_quadrature(kMaxHaarDegree + 2), DomainError);
  EXPECT_THROW(su2_quadrature(-1), DomainError);
}

TEST(haar, moments_are_exact) {
  // E|U00|^{2k} = 1/(k+1) on SU(2); balanced off-diagonal moments vanish
  for (int deg : {2, 4, 6, 8}) {
    auto q = su2_quadrature(deg);
    for (int k = 0; 2 * k <= deg; ++k)
      EXPECT_NEAR(quad_mean(q, [&](const Mat2& u) { return std::pow(std::norm(u(0, 0)), k); }),
                  1.0 / (k + 1), 1e-14)
          << deg << " " << k;
    EXPECT_NEAR(quad_mean(q, [](const Mat2& u) { return (u(0, 0) * std::conj(u(0, 1))).real(); }), 0.0,
                1e-14);
    EXPECT_NEAR(quad_mean(q, [](const Mat2& u) { return (u(0, 0) * std::conj(u(1, 0))).imag(); }), 0.0,
                1e-14);
    EXPECT_NEAR(quad_mean(q, [](const Mat2& u) { return (u(0, 0) * u(1, 1)).real(); }), 0.5,
                1e-14);
  }
  // degree-4 moment: E|U00|^2 |U01|^2 = 1/6
  auto q = su2_quadrature(4);
  EXPECT_NEAR(quad_mean(q, [](const Mat2& u) { return std::norm(u(0, 0)) * std::norm(u(0, 1)); }),
              1.0 / 6, 1e-14);
}

TEST(haar, gauss_legendre) {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  // exact for degree 9
  double s = 0;
  for (int i = 0; i < 5; ++i) s += w[i] * std::pow(x[i], 8);
  EXPECT_NEAR(s, 2.0 / 9, 1e-14);
}

TEST(haar, fidelity_operator_reproduces_direct_average) {
  for (int n : {1, 2}) {
    for (double g : {0.0, 0.3, 0.7}) {
      auto om = performance_operator(NoiseModel(g), n, Averaging::haar());
      auto q = su2_quadrature(2 * (n + 1));
      auto c = trivial_strategy(n);
      EXPECT_NEAR((c.matrix() * om.op.matrix()).trace().real(), 1 - 0.75 * g, 1e-12);
      std::vector<Mat2> us = q.nodes;
      // any valid comb: random parallel wiring via slot permutation of the trivial one
      if (n == 2) {
        auto perm = slot_permutation({2, 1}, 2);
        c = c.with_matrix(perm.matrix * c.matrix() * perm.matrix.adjoint());
      }
      double direct = direct_average_fidelity(c, n, g, us, q.weights);
      EXPECT_NEAR((c.matrix() * om.op.matrix()).trace().real(), direct, 1e-12);
    }
  }
}

TEST(haar, gate_set_operator) {
  auto gates = default_gate_set();
  ASSERT_EQ(gates.size(), 6u);
  auto om = performance_operator(NoiseModel(0.4), 2, Averaging::gate_set(gates));
  std::vector<double> w(6, 1.0 / 6);
  auto c = trivial_strategy(2);
  double direct = direct_average_fidelity(c, 2, 0.4, gates, w);
  EXPECT_NEAR((c.matrix() * om.op.matrix()).trace().real(), direct, 1e-12);
  EXPECT_NEAR(direct, 1 - 0.3, 1e-12);
}

TEST(haar, offset_form_is_shifted_fidelity) {
  // tr[C Omega_off] = 4 (F - baseline) on valid combs
  const double g = 0.35;
  auto fid = performance_operator(NoiseModel(g), 2, Averaging::haar());
  auto off = performance_operator(NoiseModel(g), 2, Averaging::haar(), Objective::nogo_offset);
  auto c = trivial_strategy(2);
  double f = (c.matrix() * fid.op.matrix()).trace().real();
  double o = (c.matrix() * off.op.matrix()).trace().real();
  EXPECT_NEAR(o, 4 * (f - (1 - 0.75 * g)), 1e-12);
}

TEST(haar, domain_errors) {
  EXPECT_THROW(performance_operator(NoiseModel(0.1), 0, Averaging::haar()), DomainError);
  EXPECT_THROW(performance_operator(NoiseModel(0.1), 9, Averaging::haar()), DomainError);
  EXPECT_THROW(build_block_structure(1), DomainError);
}

TEST(symmetry, basis_is_unitary_and_sector_dims_add_up) {
  for (int n : {2, 3}) {
    const auto& bs = block_structure(n);
    EXPECT_LT(max_abs(bs.basis.adjoint() * bs.basis - CMat::Identity(bs.dim(), bs.dim())), 1e-12);
    Index total = 0;
    int params = 0;
    for (const auto& s : bs.sectors) {
      EXPECT_EQ(s.irrep_dim, (s.two_jv + 1) * (s.two_jw + 1));
      total += Index(s.multiplicity) * s.irrep_dim;
      params += s.multiplicity * s.multiplicity;
    }
    EXPECT_EQ(total, bs.dim());
    EXPECT_EQ(params, bs.parameter_count());
  }
  EXPECT_EQ(block_structure(2).parameter_count(), 25);
  EXPECT_EQ(block_structure(3).parameter_count(), 196);
}

TEST(symmetry, block_diagonalizes_group_action) {
  std::mt19937_64 rng(33);
  for (int n : {2, 3}) {
    const auto& bs = block_structure(n);
    for (int t = 0; t < 3; ++t) {
      CMat r = group_action(haar_unitary(rng), haar_unitary(rng), n);
      CMat b = bs.basis.adjoint() * r * bs.basis;
      // off-sector entries vanish
      for (std::size_t a = 0; a < bs.sectors.size(); ++a)
        for (std::size_t c = 0; c < bs.sectors.size(); ++c) {
          if (a == c) continue;
          const auto& sa = bs.sectors[a];
          const auto& sc = bs.sectors[c];
          EXPECT_LT(max_abs(b.block(sa.offset, sc.offset, Index(sa.multiplicity) * sa.irrep_dim,
                                    Index(sc.multiplicity) * sc.irrep_dim)),
                    1e-10);
        }
    }
  }
}

TEST(symmetry, performance_operator_commutes) {
  std::mt19937_64 rng(34);
  for (int n : {2, 3}) {
    auto om = performance_operator(NoiseModel(0.4), n, Averaging::haar());
    for (int t = 0; t < 5; ++t) {
      CMat r = group_action(haar_unitary(rng), haar_unitary(rng), n);
      CMat comm = r * om.op.matrix() - om.op.matrix() * r;
      EXPECT_LT(max_abs(comm), 1e-10);
    }
  }
}

TEST(symmetry, twirl_projects_onto_commutant) {
  std::mt19937_64 rng(35);
  const auto& bs = block_structure(2);
  auto c = random_op(rng, strategy_names(2), std::vector<int>(6, 2));
  auto t1 = twirl(c, bs);
  auto t2 = twirl(t1, bs);
  EXPECT_LT(distance(t1, t2), 1e-12);
  EXPECT_NEAR(std::abs(t1.trace() - c.trace()), 0.0, 1e-10);
  CMat r = group_action(haar_unitary(rng), haar_unitary(rng), 2);
  EXPECT_LT(max_abs(r * t1.matrix() - t1.matrix() * r), 1e-10);
  auto blocks = block_extract(t1, bs);
  EXPECT_LT(distance(block_embed(blocks, bs), t1), 1e-12);
  EXPECT_THROW(block_extract(c, bs), InvariantError);
  // twirl is self-adjoint
  auto d = random_op(rng, strategy_names(2), std::vector<int>(6, 2));
  cplx lhs = (t1.matrix().adjoint() * d.matrix()).trace();
  cplx rhs = (c.matrix().adjoint() * twirl(d, bs).matrix()).trace();
  EXPECT_LT(std::abs(lhs - rhs), 1e-9);
}

TEST(symmetry, trace_pairing_through_blocks) {
  // tr[C Omega] = sum_k tr[H_k block_trace(Omega)_k] for C in the commutant
  std::mt19937_64 rng(36);
  const auto& bs = block_structure(3);
  std::vector<CMat> hs;
  for (const auto& s : bs.sectors) hs.push_back(random_hermitian(rng, s.multiplicity));
  auto c = block_embed(hs, bs);
  auto om = performance_operator(NoiseModel(0.6), 3, Averaging::haar());
  auto bt = block_trace(om.op.matrix(), bs);
  cplx s = 0;
  for (std::size_t k = 0; k < hs.size(); ++k) s += (hs[k] * bt[k]).trace();
  EXPECT_NEAR(std::abs(s - (c.matrix() * om.op.matrix()).trace()), 0.0, 1e-10);
}

TEST(symmetry, printed_two_slot_blocks) {
  const auto& bs = block_structure(2);
  for (double g : {0.2, 0.5, 0.8}) {
    const double a = 1 - g;
    auto om = performance_operator(NoiseModel(g), 2, Averaging::haar(), Objective::nogo_offset);
    auto bt = block_trace(om.op.matrix(), bs);
    CMat o00 = CMat::Zero(4, 4);
    o00(0, 0) = -a * (3 * a * a + 1) / 6;
    o00(0, 1) = o00(1, 0) = -a * (2 - g);
    o00(1, 1) = -1.5 * a * (3 * a * a + 1);
    o00(2, 2) = o00(3, 3) = -1.5 * g * g * g + 4.5 * g * g - 3 * g;
    o00(2, 3) = o00(3, 2) = a * g;
    CMat o11 = CMat::Zero(2, 2);
    o11(0, 0) = -a * (3 * a * a + 13) / 3;
    o11(1, 1) = -3 * a * (1 - a * a);
    EXPECT_LT(max_abs(bt[0] - o00), 1e-10) << g;
    EXPECT_LT(max_abs(bt[1] - o11), 1e-10) << g;
    EXPECT_LT(max_abs(bt[2] - o11), 1e-10) << g;
    EXPECT_NEAR(std::abs(bt[3](0, 0) - (-2.0 / 3 * a * (3 * a * a + 7))), 0.0, 1e-10) << g;
  }
}

TEST(symmetry, export_import_round_trip) {
  std::mt19937_64 rng(37);
  CMat m = random_complex(rng, 5, 3);
  const std::string path = ::testing::TempDir() + "/qcomb_matrix.bin";
  export_matrix(m, path);
  EXPECT_EQ(import_matrix(path), m);
}
