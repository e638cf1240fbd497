#include "fixtures.hpp"

#include <hbl/decay.hpp>
#include <hbl/errors.hpp>
#include <hbl/expm.hpp>
#include <hbl/model.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hbl;

namespace {

double defect_bound(const Symmetrizer& s, const CMat& M) { return symmetrizer_defect(s, M); }

Vec dir1(double sign = 1.0) { return Vec::Constant(1, sign); }

// Independent oracle: composite Simpson in log r of |S^{d-1}| r^{d-1} exp(-2 rho(r) t).
double scalar_G_oracle(int d, double t) {
  const double area = d == 1 ? 2.0 : d == 2 ? 2.0 * M_PI : 4.0 * M_PI;
  const double a = std::log(1e-4), b = std::log(1e4);
  const int n = 200000;
  const double h = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = std::exp(a + i * h);
    const double f = std::pow(r, d) * std::exp(-2.0 * t * r * r / (1.0 + r * r));
    acc += (i == 0 || i == n ? 1.0 : i % 2 ? 4.0 : 2.0) * f;
  }
  return std::sqrt(area * acc * h / 3.0);
}

}  // namespace

TEST(Symmetrizer, TelegraphAllRegimes) {
  const auto sys = fixtures::telegraph();
  const auto small = symmetrizer_small(sys, 0.01, dir1());
  const auto mid = symmetrizer_mid(sys, Vec::Constant(1, 1.0));
  const auto large = symmetrizer_large(sys, Vec::Constant(1, 100.0));
  EXPECT_EQ(small.regime, Regime::small);
  EXPECT_EQ(large.regime, Regime::large);
  for (const auto* s : {&small, &mid, &large}) {
    EXPECT_GT(s->certified_c, 0.0);
    EXPECT_GT(s->lambda_min, 0.0);
    EXPECT_NEAR(s->lambda_max, 1.0, 1e-12);
    EXPECT_LE(defect_bound(*s, sys.dispersion(s->xi)), 1e-9);
  }
}

TEST(Symmetrizer, InvariantOverRandomSystems) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const auto sys = fixtures::random_symmetric_dissipative(rng, 3 + trial % 3, 1 + trial % 2);
    for (double r : {1e-3, 1e-2, 0.3, 3.0, 1e2, 1e3}) {
      for (double sign : {1.0, -1.0}) {
        std::optional<Symmetrizer> s;
        try {
          if (r < 0.05)
            s = symmetrizer_small(sys, r, dir1(sign));
          else if (r > 50)
            s = symmetrizer_large(sys, Vec::Constant(1, sign * r));
          else
            s = symmetrizer_mid(sys, Vec::Constant(1, sign * r));
        } catch (const RegimeBoundary&) {
          continue;
        }
        EXPECT_LE(defect_bound(*s, sys.dispersion(s->xi)), 1e-9);
        EXPECT_GT(s->certified_c, 0.0);
      }
    }
  }
}

TEST(Symmetrizer, CrossRegimeConsistency) {
  const auto sys = fixtures::telegraph();
  const double r = 0.05;
  const auto a = symmetrizer_small(sys, r, dir1());
  const auto b = symmetrizer_mid(sys, Vec::Constant(1, r));
  EXPECT_LT(std::max(a.certified_c, b.certified_c) / std::min(a.certified_c, b.certified_c), 10.0);
  const auto c = symmetrizer_large(sys, Vec::Constant(1, 20.0));
  const auto d = symmetrizer_mid(sys, Vec::Constant(1, 20.0));
  EXPECT_LT(std::max(c.certified_c, d.certified_c) / std::min(c.certified_c, d.certified_c), 10.0);
}

TEST(Symmetrizer, SmallRegimeBoundary) {
  EXPECT_THROW(symmetrizer_small(fixtures::telegraph(), 0.5, dir1()), RegimeBoundary);
}

TEST(Symmetrizer, LargeRegimeDetectsD3Failure) {
  const auto sys = jinxin_normal_form(fixtures::kappa_jinxin(1, 8));
  EXPECT_THROW(symmetrizer_large(sys, Vec::Constant(1, 100.0)), ConditionViolation);
}

TEST(Symmetrizer, SmallRegimeDetectsD2Failure) {
  const auto sys = jinxin_normal_form(fixtures::kappa_jinxin(2, 6));
  EXPECT_THROW(symmetrizer_small(sys, 0.01, dir1()), ConditionViolation);
}

TEST(Symmetrizer, MidRegimeNeedsD1) {
  const LinearSystem skew({fixtures::m2(0, 1, 1, 0)}, Mat::Zero(2, 2), 1);
  EXPECT_THROW(symmetrizer_mid(skew, Vec::Constant(1, 1.0)), NotHurwitz);
}

TEST(Certify, Telegraph) {
  const auto model = SymbolModel::from_system(fixtures::telegraph());
  const auto cert = certify_decay(model, RadialGrid::make(), SphereGrid::make(1), linear_times(50.0, 40));
  EXPECT_TRUE(cert.pass);
  EXPECT_GT(cert.c, 0.0);
  EXPECT_NEAR(cert.c_inf, 0.5, 1e-6);
  EXPECT_NEAR(cert.c, 0.9 * cert.c_inf, 1e-15);
  EXPECT_EQ(cert.envelope.size(), 61u * 2u * 40u);
  for (const auto& e : cert.envelope) EXPECT_LE(e.ratio, cert.C * (1 + 1e-12));
}

TEST(Certify, ScalarModel) {
  const auto cert = certify_decay(SymbolModel::scalar(1, false), RadialGrid::make(), SphereGrid::make(1),
                                  linear_times(50.0, 40));
  EXPECT_TRUE(cert.pass);
  EXPECT_NEAR(cert.c_inf, 1.0, 1e-9);
  EXPECT_NEAR(cert.C, 1.0, 1e-9);
}

TEST(Certify, FailuresCarryRegimeWitness) {
  const RadialGrid rg = RadialGrid::make();
  const SphereGrid sg = SphereGrid::make(1);
  const auto t = linear_times(50.0, 40);
  const auto c18 = certify_decay(SymbolModel::from_system(jinxin_normal_form(fixtures::kappa_jinxin(1, 8))), rg, sg, t);
  EXPECT_FALSE(c18.pass);
  EXPECT_EQ(c18.witness.regime, Regime::large);
  EXPECT_GE(c18.witness.eigenvalue.real(), -1e-6);
  const auto c26 = certify_decay(SymbolModel::from_system(jinxin_normal_form(fixtures::kappa_jinxin(2, 6))), rg, sg, t);
  EXPECT_FALSE(c26.pass);
  EXPECT_EQ(c26.witness.regime, Regime::small);
  EXPECT_GE(c26.witness.eigenvalue.real(), -1e-6);
}

TEST(Certify, RegimeDiagnostics) {
  const auto diag = regime_diagnostics(fixtures::telegraph(), RadialGrid::make(1e-3, 1e3, 13), SphereGrid::make(1));
  ASSERT_FALSE(diag.empty());
  int certified = 0;
  for (const auto& d : diag)
    if (d.certified_c) {
      ++certified;
      EXPECT_GT(*d.certified_c, 0.0);
    }
  EXPECT_GT(certified, 26);
}

TEST(Semigroup, ScalarQuadratureOracle) {
  const std::vector<double> ts{1.0, 1e2, 1e3, 1e4};
  for (int d : {1, 2, 3}) {
    const auto s = semigroup_decay(SymbolModel::scalar(d, false), ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
      EXPECT_NEAR(s.G[i] / scalar_G_oracle(d, ts[i]), 1.0, 1e-6) << "d=" << d << " t=" << ts[i];
  }
}

TEST(Semigroup, ScalarSlopes) {
  const auto ts = geometric_times(1e2, 1e4, 12);
  EXPECT_NEAR(semigroup_decay(SymbolModel::scalar(1, false), ts).slope, -0.25, 0.03);
  EXPECT_NEAR(semigroup_decay(SymbolModel::scalar(3, false), ts).slope, -0.75, 0.05);
}

TEST(Semigroup, TelegraphSlopeAndMonotonicity) {
  const auto ts = geometric_times(1e2, 1e4, 12);
  const auto s = semigroup_decay(SymbolModel::from_system(fixtures::telegraph()), ts);
  EXPECT_NEAR(s.slope, -0.25, 0.05);
  for (std::size_t i = 1; i < s.G.size(); ++i) EXPECT_LE(s.G[i], s.G[i - 1]);
}

TEST(Semigroup, UndampedSymbolIsRejected) {
  const LinearSystem skew({fixtures::m2(0, 1, 1, 0)}, fixtures::m2(0, 0, 0, -1e-9), 1);
  EXPECT_THROW(semigroup_decay(SymbolModel::from_system(skew), geometric_times(1e2, 1e4, 4)), QuadratureError);
}

TEST(Semigroup, GeometricTimes) {
  const auto t = geometric_times(1.0, 1e4, 5);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t.front(), 1.0);
  EXPECT_NEAR(t[1], 10.0, 1e-12);
  EXPECT_NEAR(t.back(), 1e4, 1e-9);
}
