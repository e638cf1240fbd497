#include "fixtures.hpp"

#include <hbl/dissipativity.hpp>
#include <hbl/errors.hpp>
#include <hbl/model.hpp>

#include <gtest/gtest.h>

using namespace hbl;
using fixtures::m2;

namespace {

const SphereGrid& s1() {
  static const SphereGrid g = SphereGrid::make(1);
  return g;
}

void expect_consistent(const ConditionReport& r) {
  EXPECT_EQ(r.margin <= 0.0, r.verdict == Verdict::fails) << r.condition << " margin " << r.margin;
  if (r.verdict == Verdict::fails) EXPECT_FALSE(r.witnesses.empty());
}

LinearSystem diag_example() { return LinearSystem({m2(1, 0, 0, -1)}, m2(0, 0, 0, -1), 1); }

}  // namespace

TEST(Grids, SphereAndRadial) {
  const auto g1 = SphereGrid::make(1);
  ASSERT_EQ(g1.points.size(), 2u);
  EXPECT_EQ(g1.points[0][0], 1.0);
  EXPECT_EQ(g1.points[1][0], -1.0);
  EXPECT_EQ(SphereGrid::make(2).points.size(), 720u);
  const auto g3 = SphereGrid::make(3);
  EXPECT_EQ(g3.points.size(), 2000u);
  for (const auto& p : g3.points) EXPECT_NEAR(p.norm(), 1.0, 1e-14);
  const auto r = RadialGrid::make();
  ASSERT_EQ(r.radii.size(), 61u);
  EXPECT_NEAR(r.radii.front(), 1e-3, 1e-18);
  EXPECT_NEAR(r.radii.back(), 1e3, 1e-9);
  for (std::size_t i = 1; i < r.radii.size(); ++i) EXPECT_GT(r.radii[i], r.radii[i - 1]);
  EXPECT_DOUBLE_EQ(rho(1.0), 0.5);
}

TEST(CheckH, Examples) {
  const auto t = check_H(fixtures::telegraph(), s1());
  EXPECT_EQ(t.verdict, Verdict::holds);
  expect_consistent(t);

  const auto j = check_H(LinearSystem({m2(0, 1, 0, 0)}, m2(0, 0, 0, -1), 1), s1());
  EXPECT_EQ(j.verdict, Verdict::fails);
  ASSERT_FALSE(j.witnesses.empty());
  EXPECT_LT(std::abs(j.witnesses[0].eigenvalue), 1e-6);
  expect_consistent(j);

  const auto jx = jinxin_normal_form(fixtures::jinxin_2d_scalar(0, 0, 1, 1));
  EXPECT_EQ(check_H(jx, SphereGrid::make(2)).verdict, Verdict::holds);
}

TEST(CheckRH, Examples) {
  const auto t = check_RH(fixtures::telegraph_spec());
  EXPECT_EQ(t.verdict, Verdict::holds);
  EXPECT_NEAR(t.margin, 1.0, 1e-9);

  Mat Q = Mat::Zero(3, 3);
  Q.bottomRightCorner(2, 2) = m2(0, 1, -1, 0);
  const auto rot = check_RH(LinearSystem({Mat::Identity(3, 3)}, Q, 1));
  EXPECT_EQ(rot.verdict, Verdict::fails);
  expect_consistent(rot);

  const auto jx = check_RH(build_jinxin(fixtures::kappa_jinxin(3, 6)));
  EXPECT_EQ(jx.verdict, Verdict::holds);
  EXPECT_NEAR(jx.margin, 1.0, 1e-9);
}

TEST(CheckK, Examples) {
  EXPECT_EQ(check_K(fixtures::telegraph(), s1()).verdict, Verdict::holds);
  const auto d = check_K(diag_example(), s1());
  EXPECT_EQ(d.verdict, Verdict::fails);
  ASSERT_FALSE(d.witnesses.empty());
  expect_consistent(d);
  bool at_one = false;
  for (const auto& w : d.witnesses) at_one = at_one || std::abs(std::abs(w.eigenvalue) - 1.0) < 1e-8;
  EXPECT_TRUE(at_one);
}

TEST(StableCompat, Examples) {
  const auto zero1 = [](const Vec&) -> CMat { return CMat::Zero(1, 1); };
  const auto minus1 = [](const Vec&) -> CMat { return -CMat::Identity(1, 1); };
  EXPECT_EQ(stable_compat(zero1, minus1, s1()).verdict, Verdict::holds);

  const auto zero2 = [](const Vec&) -> CMat { return CMat::Zero(2, 2); };
  const auto semi = [](const Vec&) -> CMat { return m2(-1, 0, 0, 0).cast<cplx>(); };
  const auto r = stable_compat(zero2, semi, s1());
  EXPECT_EQ(r.verdict, Verdict::fails);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_LT(std::abs(r.witnesses[0].eigenvalue), 1e-9);

  const auto nil = [](const Vec& w) -> CMat { return -kI * (fixtures::nilpotent_K() * w[0]).cast<cplx>(); };
  const auto any = [](const Vec&) -> CMat { return -CMat::Identity(2, 2); };
  const auto n = stable_compat(nil, any, s1());
  EXPECT_EQ(n.verdict, Verdict::fails);
  ASSERT_FALSE(n.witnesses.empty());
  EXPECT_LT(std::abs(n.witnesses[0].eigenvalue), 1e-6);
}

TEST(CheckD1, Examples) {
  const RadialGrid rg = RadialGrid::make();
  const auto t = check_D1(fixtures::telegraph(), rg, s1());
  EXPECT_EQ(t.verdict, Verdict::holds);
  EXPECT_EQ(t.curve.size(), rg.radii.size());
  expect_consistent(t);

  const auto skew = check_D1(LinearSystem({m2(0, 1, 1, 0)}, Mat::Zero(2, 2), 1), rg, s1());
  EXPECT_EQ(skew.verdict, Verdict::fails);
  expect_consistent(skew);

  const auto jx = check_D1(jinxin_normal_form(fixtures::kappa_jinxin(3, 6)), rg, s1());
  EXPECT_EQ(jx.verdict, Verdict::holds);
}

// Closed form for the telegraph curve: max Re of λ² + λ + r² = 0.
TEST(CheckD1, TelegraphCurveOracle) {
  const auto t = check_D1(fixtures::telegraph(), RadialGrid::make(), s1());
  for (const auto& p : t.curve) {
    const double disc = 1.0 - 4.0 * p.radius * p.radius;
    const double want = disc >= 0 ? (-1.0 + std::sqrt(disc)) / 2.0 : -0.5;
    EXPECT_NEAR(p.worst_real, want, 1e-9 * (1 + std::abs(want)) + 1e-12);
  }
}

TEST(CheckD2, Examples) {
  const auto t = check_D2(fixtures::telegraph(), s1());
  EXPECT_EQ(t.verdict, Verdict::holds);
  EXPECT_NEAR(t.margin, 1.0 - 1e-8, 1e-6);

  // m = 1 reduces to the sign of A12 L^{-1} A21.
  const LinearSystem bad({m2(0, 1, -1, 0)}, m2(0, 0, 0, -1), 1);
  EXPECT_EQ(check_D2(bad, s1()).verdict, Verdict::fails);

  Mat Q = m2(0, 0, 1, -1);
  EXPECT_THROW(check_D2(LinearSystem({m2(0, 1, 1, 0)}, Q, 1), s1()), ValidationError);
}

TEST(CheckD3, Examples) {
  const auto t = check_D3(fixtures::telegraph(), s1());
  EXPECT_EQ(t.verdict, Verdict::holds);
  EXPECT_NEAR(t.margin, 0.5 - 1e-8, 1e-6);

  const auto d = check_D3(diag_example(), s1());
  EXPECT_EQ(d.verdict, Verdict::fails);
  ASSERT_FALSE(d.witnesses.empty());
  expect_consistent(d);
}

TEST(CheckD3, KernelGroupMechanism) {
  // A(ω) has a kernel eigenvector e1 that the source does not see: projected block is 0.
  Mat A = Mat::Zero(3, 3);
  A(1, 2) = A(2, 1) = 1.0;
  Mat Q = Mat::Zero(3, 3);
  Q.bottomRightCorner(2, 2) = -Mat::Identity(2, 2);
  const LinearSystem sys({A}, Q, 1);
  EXPECT_EQ(check_D3(sys, s1()).verdict, Verdict::fails);
  EXPECT_EQ(check_K(sys, s1()).verdict, Verdict::fails);
}

TEST(Reports, MarginSignMatchesVerdict) {
  std::mt19937_64 rng(31);
  const RadialGrid rg = RadialGrid::make(1e-3, 1e3, 31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 3;
    const auto sys = fixtures::random_symmetric_dissipative(rng, n, 1 + trial % 2);
    for (const auto& r : {check_H(sys, s1()), check_RH(sys), check_K(sys, s1()), check_D1(sys, rg, s1()),
                          check_D2(sys, s1()), check_D3(sys, s1())})
      expect_consistent(r);
  }
}
