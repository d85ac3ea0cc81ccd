#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "qcomb/circuits.hpp"
#include "qcomb/strategies.hpp"
#include "qcomb/theorems.hpp"
#include "support.hpp"

using namespace qcomb;
using namespace qtest;

TEST(surd, parse_and_evaluate) {
  EXPECT_NEAR(parse_surd("1/r3").value(), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(parse_surd("-r6/4").value(), -std::sqrt(6.0) / 4, 1e-15);
  EXPECT_NEAR(parse_surd("1/6-r2/3").value(), 1.0 / 6 - std::sqrt(2.0) / 3, 1e-15);
  EXPECT_NEAR(parse_surd(" 3 ").value(), 3.0, 0);
  EXPECT_TRUE(parse_surd("0").is_zero());
  EXPECT_THROW(parse_surd(""), DomainError);
  EXPECT_THROW(parse_surd("r5"), DomainError);
  EXPECT_THROW(parse_surd("1/0"), DomainError);
  EXPECT_THROW(parse_surd("abc"), DomainError);
}

TEST(surd, field_arithmetic) {
  // r2 * r3 = r6, r6 * r6 = 6, (1 + r2)(1 - r2) = -1
  EXPECT_EQ(Surd::root(2) * Surd::root(3), Surd::root(6));
  EXPECT_EQ(Surd::root(6) * Surd::root(6), Surd::rational(6));
  Surd a = Surd::rational(1) + Surd::root(2), b = Surd::rational(1) - Surd::root(2);
  EXPECT_EQ(a * b, Surd::rational(-1));
  EXPECT_EQ((a / Surd::root(2)) * Surd::root(2), a);
  EXPECT_THROW(a / a, DomainError);
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> q(-9, 9), d(1, 9);
  for (int t = 0; t < 200; ++t) {
    Surd x, y;
    for (int k = 0; k < 4; ++k) {
      x.c[k] = Rational(q(rng), d(rng));
      y.c[k] = Rational(q(rng), d(rng));
    }
    EXPECT_NEAR((x * y).value(), x.value() * y.value(), 1e-12);
    EXPECT_NEAR((x + y).value(), x.value() + y.value(), 1e-13);
    EXPECT_EQ(parse_surd(x.str()), x) << x.str();
  }
}

TEST(circuits, constants_are_isometries) {
  const auto& c = load_constants();
  const std::map<std::string, std::pair<int, int>> shapes{
      {"V1", {8, 2}},   {"V2", {16, 8}}, {"V3", {16, 16}}, {"V4", {20, 16}},
      {"U4", {20, 20}}, {"U41", {8, 8}}, {"U42", {8, 8}},  {"U43", {4, 4}}};
  for (const auto& [name, rc] : shapes) {
    const auto& k = c.at(name);
    ASSERT_EQ(k.matrix.rows(), rc.first) << name;
    ASSERT_EQ(k.matrix.cols(), rc.second) << name;
    EXPECT_LT(max_abs(k.matrix.adjoint() * k.matrix - CMat::Identity(rc.second, rc.second)), 1e-12)
        << name;
    // exact column Gram is the identity
    auto g = exact_gram(k);
    for (int i = 0; i < rc.second; ++i)
      for (int j = 0; j < rc.second; ++j)
        EXPECT_EQ(g[i][j], Surd::rational(i == j ? 1 : 0)) << name << " " << i << " " << j;
  }
  EXPECT_NO_THROW(check_kraus_complete(v4_kraus()));
  EXPECT_EQ(v4_kraus().size(), 10u);
}

TEST(circuits, u4_block_permutation) {
  const auto& c = load_constants();
  auto d = block_diag({c.at("U41").exact, c.at("U42").exact, c.at("U43").exact});
  EXPECT_TRUE(permutation_matches(c.at("U4").exact, d, u4_permutation()));
  auto found = find_block_permutation(c.at("U4").exact, d);
  ASSERT_TRUE(found.has_value());
  EXPECT_TRUE(permutation_matches(c.at("U4").exact, d, *found));
  // a wrong permutation fails
  auto p = u4_permutation();
  std::swap(p.rows[0], p.rows[1]);
  EXPECT_FALSE(permutation_matches(c.at("U4").exact, d, p));
  // floating point: U4[r, c] == blockdiag exactly
  CMat bd = CMat::Zero(20, 20);
  bd.block(0, 0, 8, 8) = c.at("U41").matrix;
  bd.block(8, 8, 8, 8) = c.at("U42").matrix;
  bd.block(16, 16, 4, 4) = c.at("U43").matrix;
  auto q = u4_permutation();
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) EXPECT_EQ(c.at("U4").matrix(q.rows[i], q.cols[j]), bd(i, j));
}

TEST(circuits, protocol_fidelity_matches_closed_form) {
  std::mt19937_64 rng(62);
  for (double g : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (int t = 0; t < 3; ++t) {
      CMat u = haar_unitary(rng);
      auto j = run_protocol(u, g);
      EXPECT_NEAR(channel_fidelity(j, u), optimal_fidelity_3slot(g), 1e-10) << g;
    }
  }
  EXPECT_THROW(run_protocol(CMat::Identity(2, 2) * 2.0, 0.1), DomainError);
}

TEST(circuits, protocol_comb_is_sequential_and_consistent) {
  const auto& c = protocol_as_strategy();
  auto rep = check_strategy(c, sequential_constraints(3));
  EXPECT_TRUE(rep.feasible) << rep.max_residual;
  std::mt19937_64 rng(63);
  CMat u = haar_unitary(rng);
  auto eff = effective_channel(c, noisy_unitary_choi(u, NoiseModel(0.3)), 3);
  EXPECT_LT(distance(eff.op(), run_protocol(u, 0.3).op()), 1e-12);
}

TEST(circuits, protocol_spec_shape) {
  auto spec = protocol_spec();
  int slots = 0;
  for (const auto& s : spec.stages) slots += s.kind == "slot";
  EXPECT_EQ(slots, 3);
  EXPECT_EQ(spec.stages.front().name, "V1");
  EXPECT_EQ(spec.stages.back().kind, "kraus");
}

TEST(circuits, export_round_trips) {
  std::ostringstream os;
  export_constants(os);
  std::istringstream is(os.str());
  const auto& c = load_constants();
  std::string name;
  int r = 0, k = 0, seen = 0;
  while (is >> name >> r >> k) {
    const auto& t = c.at(name);
    ASSERT_EQ(int(t.exact.size()), r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < k; ++j) {
        std::string tok;
        is >> tok;
        EXPECT_EQ(parse_surd(tok), t.exact[i][j]);
      }
    ++seen;
  }
  EXPECT_EQ(seen, 8);
}
