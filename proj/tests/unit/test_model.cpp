#include "fixtures.hpp"

#include <hbl/errors.hpp>
#include <hbl/model.hpp>
#include <hbl/spectral.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace hbl;

namespace {

double spectrum_distance(const CVec& a, const CVec& b) {
  // greedy matching, fine for the small generic spectra used here
  std::vector<cplx> rest(b.data(), b.data() + b.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    auto it = std::min_element(rest.begin(), rest.end(), [&](cplx x, cplx y) { return std::abs(x - a[i]) < std::abs(y - a[i]); });
    worst = std::max(worst, std::abs(*it - a[i]));
    rest.erase(it);
  }
  return worst;
}

}  // namespace

TEST(Model, TelegraphDispersion) {
  const auto sys = fixtures::telegraph();
  Vec xi(1);
  xi << 2.0;
  const CMat M = sys.dispersion(xi);
  EXPECT_EQ(M(0, 0), cplx(0, 0));
  EXPECT_EQ(M(0, 1), cplx(0, -2));
  EXPECT_EQ(M(1, 0), cplx(0, -2));
  EXPECT_EQ(M(1, 1), cplx(-1, 0));
  EXPECT_TRUE(sys.in_normal_form());
  EXPECT_DOUBLE_EQ(sys.reduced_coupling(Vec::Ones(1))(0, 0), -1.0);
}

TEST(Model, ValidationRejectsSourceInConservedRows) {
  auto s = fixtures::telegraph_spec();
  s.source_jacobian(0, 1) = 0.5;
  EXPECT_THROW(s.validate(), ValidationError);
  EXPECT_THROW(linearize(s), ValidationError);
}

TEST(Model, ValidationRejectsWrongShapes) {
  auto s = fixtures::telegraph_spec();
  s.flux_jacobians[0] = Mat::Zero(3, 3);
  EXPECT_THROW(s.validate(), ValidationError);
  s = fixtures::telegraph_spec();
  s.m = 2;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Model, NormalFormPreservesSpectrum) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4, m = 2;
    Mat A = fixtures::random_matrix(rng, n, n);
    A = (A + A.transpose()).eval();
    Mat Q = Mat::Zero(n, n);
    Q.bottomLeftCorner(n - m, m) = fixtures::random_matrix(rng, n - m, m);
    Q.bottomRightCorner(n - m, n - m) = -fixtures::random_spd(rng, n - m);
    const LinearSystem sys({A}, Q, m);
    const LinearSystem nf = normal_form(sys);
    EXPECT_TRUE(nf.in_normal_form(1e-12));
    EXPECT_LT((nf.L_block() - Q.bottomRightCorner(n - m, n - m)).norm(), 1e-12);
    for (double r : {0.01, 1.0, 30.0}) {
      Vec xi(1);
      xi << r;
      EXPECT_LT(spectrum_distance(eigenvalues(sys.dispersion(xi)), eigenvalues(nf.dispersion(xi))), 1e-9 * (1 + r));
    }
  }
}

TEST(Model, NormalFormRejectsSingularSourceBlock) {
  Mat Q = Mat::Zero(2, 2);
  Q(1, 0) = 1.0;
  const LinearSystem sys({fixtures::m2(0, 1, 1, 0)}, Q, 1);
  EXPECT_THROW(normal_form(sys), NotTransformable);
}

TEST(Model, JinXinAssembly) {
  const auto jx = fixtures::jinxin_2d_scalar(1.0, 0.0, 2.0, 3.0);
  const auto spec = build_jinxin(jx);
  EXPECT_EQ(spec.n, 3);
  EXPECT_EQ(spec.m, 1);
  EXPECT_DOUBLE_EQ(spec.flux_jacobians[0](0, 1), 1.0);
  EXPECT_DOUBLE_EQ(spec.flux_jacobians[0](1, 0), 2.0);
  EXPECT_DOUBLE_EQ(spec.flux_jacobians[1](0, 2), 1.0);
  EXPECT_DOUBLE_EQ(spec.flux_jacobians[1](2, 0), 3.0);
  EXPECT_DOUBLE_EQ(spec.source_jacobian(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(spec.source_jacobian(1, 1), -1.0);
  EXPECT_NO_THROW(spec.validate());
}

TEST(Model, JinXinRejectsIndefiniteB) {
  auto jx = fixtures::kappa_jinxin(1.0, -1.0);
  EXPECT_THROW(jx.validate(), ValidationError);
  jx = fixtures::kappa_jinxin(1.0, 2.0);
  jx.eps = 0.0;
  EXPECT_THROW(jx.validate(), ValidationError);
}

// In d = 1 the pencil roots of the second-order reduction are the full spectrum.
TEST(Model, PencilRootsMatchFullSpectrum) {
  for (double k1 : {1.0, 3.0})
    for (double k2 : {2.0, 6.0}) {
      const auto jx = fixtures::kappa_jinxin(k1, k2);
      const auto sys = linearize(build_jinxin(jx));
      const auto wave = second_order_reduction(jx);
      for (double r : {0.05, 0.7, 4.0}) {
        Vec xi(1);
        xi << r;
        const CVec roots = wave.pencil_roots(xi);
        EXPECT_LT(spectrum_distance(roots, eigenvalues(sys.dispersion(xi))), 1e-8);
        for (Eigen::Index i = 0; i < roots.size(); ++i)
          EXPECT_LT(std::abs(wave.pencil(roots[i], xi).determinant()), 1e-7);
      }
    }
}

TEST(Model, PolyJacobianMatchesFiniteDifferences) {
  std::vector<std::vector<Monomial>> terms(2);
  terms[0] = {{1.0, {1, 0}}, {0.5, {2, 1}}};
  terms[1] = {{-2.0, {0, 3}}, {0.25, {1, 1}}};
  const PolyMap F(2, terms);
  EXPECT_EQ(F.degree(), 3);
  Vec x(2);
  x << 0.3, -0.7;
  const Mat J = F.jacobian(x);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vec e = Vec::Zero(2);
    e[j] = h;
    const Vec col = (F.eval(x + e) - F.eval(x - e)) / (2 * h);
    EXPECT_LT((col - J.col(j)).norm(), 1e-8);
  }
}

TEST(Model, PolyLinearRoundTrip) {
  const Mat J = fixtures::m2(1, -2, 3, 4);
  const PolyMap F = PolyMap::linear(J);
  Vec x(2);
  x << 0.5, 2.0;
  EXPECT_LT((F.eval(x) - J * x).norm(), 1e-15);
  EXPECT_LT((F.jacobian(Vec::Zero(2)) - J).norm(), 1e-15);
}

TEST(Model, ScalarJinXinIsTelegraph) {
  const auto jx = fixtures::jinxin_2d_scalar(0, 0, 1, 1);
  hbl::JinXinSpec one;
  one.dim = 1;
  one.m = 1;
  one.b = {Mat::Ones(1, 1)};
  one.flux_jac = {Mat::Zero(1, 1)};
  const auto sys = linearize(build_jinxin(one));
  EXPECT_LT((sys.flux()[0] - fixtures::m2(0, 1, 1, 0)).norm(), 1e-15);
  EXPECT_LT((sys.source() - fixtures::m2(0, 0, 0, -1)).norm(), 1e-15);

  const auto sys2 = jinxin_normal_form(jx);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 10; ++k) {
    Vec w(2);
    w << nd(rng), nd(rng);
    w.normalize();
    CVec ev = eigenvalues(sys2.symbol(w).cast<cplx>());
    std::vector<double> re;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      EXPECT_LT(std::abs(ev[i].imag()), 1e-12);
      re.push_back(ev[i].real());
    }
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], -1.0, 1e-12);
    EXPECT_NEAR(re[1], 0.0, 1e-12);
    EXPECT_NEAR(re[2], 1.0, 1e-12);
  }
}

TEST(Model, JinXinNormalFormBlocks) {
  for (double k1 : {1.0, 2.0, 3.0}) {
    const auto jx = fixtures::kappa_jinxin(k1, 6.0);
    const auto nf = jinxin_normal_form(jx);
    ASSERT_TRUE(nf.in_normal_form(1e-14));
    const Vec w = Vec::Ones(1);
    const Mat K = jx.K(w);
    EXPECT_LT((nf.A11(w) - K).norm(), 1e-12);
    EXPECT_LT((nf.reduced_coupling(w) - (-jx.B_calligraphic(w) + K * K)).norm(), 1e-12);
  }
  const auto nil = jinxin_normal_form(fixtures::kappa_jinxin(2.0, 5.0, fixtures::nilpotent_K()));
  EXPECT_LT((nil.reduced_coupling(Vec::Ones(1)) + fixtures::m2(2, 0, 0, 5)).norm(), 1e-12);
}

TEST(Model, PencilClosedForms) {
  hbl::JinXinSpec jx;
  jx.dim = 1;
  jx.m = 1;
  jx.b = {Mat::Ones(1, 1)};
  jx.flux_jac = {Mat::Zero(1, 1)};
  const auto wave = second_order_reduction(jx);
  CVec r = wave.pencil_roots(Vec::Ones(1));
  const cplx want(-0.5, std::sqrt(3.0) / 2.0);
  EXPECT_LT(std::min(std::abs(r[0] - want), std::abs(r[1] - want)), 1e-12);
  EXPECT_LT(std::min(std::abs(r[0] - std::conj(want)), std::abs(r[1] - std::conj(want))), 1e-12);
  r = wave.pencil_roots(Vec::Zero(1));
  EXPECT_LT(std::min(std::abs(r[0]), std::abs(r[1])), 1e-12);
  EXPECT_LT(std::min(std::abs(r[0] + 1.0), std::abs(r[1] + 1.0)), 1e-12);
}
