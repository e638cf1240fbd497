#pragma once

#include <hbl/model.hpp>
#include <hbl/poly.hpp>

#include <random>
#include <vector>

namespace fixtures {

using hbl::Mat;
using hbl::Vec;

inline Mat m2(double a, double b, double c, double d) {
  Mat M(2, 2);
  M << a, b, c, d;
  return M;
}

// u_t + v_x = 0, v_t + u_x = -v.
inline hbl::BalanceLawSpec telegraph_spec() {
  hbl::BalanceLawSpec s;
  s.dim = 1;
  s.n = 2;
  s.m = 1;
  s.equilibrium = Vec::Zero(2);
  s.flux_jacobians = {m2(0, 1, 1, 0)};
  s.source_jacobian = m2(0, 0, 0, -1);
  return s;
}

inline hbl::LinearSystem telegraph() { return hbl::linearize(telegraph_spec()); }

// K = D_uF(0) for F(u) = (u1 - u2, u2 - u1).
inline Mat coupling_K() { return m2(1, -1, -1, 1); }
// The nilpotent matrix [[1,-1],[1,-1]].
inline Mat nilpotent_K() { return m2(1, -1, 1, -1); }

inline hbl::JinXinSpec kappa_jinxin(double k1, double k2, const Mat& K = coupling_K()) {
  hbl::JinXinSpec jx;
  jx.dim = 1;
  jx.m = 2;
  jx.b = {m2(k1, 0, 0, k2)};
  jx.flux_jac = {K};
  return jx;
}

inline hbl::JinXinSpec jinxin_2d_scalar(double K1, double K2, double b1, double b2) {
  hbl::JinXinSpec jx;
  jx.dim = 2;
  jx.m = 1;
  jx.b = {Mat::Constant(1, 1, b1), Mat::Constant(1, 1, b2)};
  jx.flux_jac = {Mat::Constant(1, 1, K1), Mat::Constant(1, 1, K2)};
  return jx;
}

// Scalar 1-D Jin-Xin with F(u) = a u + u^2 / 2.
inline hbl::JinXinSpec burgers_jinxin(double a, double b, double eps = 1.0) {
  hbl::JinXinSpec jx;
  jx.dim = 1;
  jx.m = 1;
  jx.eps = eps;
  jx.b = {Mat::Constant(1, 1, b)};
  jx.flux_jac = {Mat::Constant(1, 1, a)};
  std::vector<std::vector<hbl::Monomial>> terms(1);
  terms[0].push_back({a, {1}});
  terms[0].push_back({0.5, {2}});
  jx.flux_poly = std::vector<hbl::PolyMap>{hbl::PolyMap(1, terms)};
  return jx;
}

inline Mat random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = nd(rng);
  return M;
}

inline Mat random_spd(std::mt19937_64& rng, int n, double floor = 0.5) {
  const Mat G = random_matrix(rng, n, n);
  return G * G.transpose() / n + floor * Mat::Identity(n, n);
}

// Symmetric hyperbolic 1-D system in normal form with 𝓛 = diag(0, -SPD).
// Generic draws satisfy (K), hence (D2) and (D3).
inline hbl::LinearSystem random_symmetric_dissipative(std::mt19937_64& rng, int n, int m) {
  Mat A = random_matrix(rng, n, n);
  A = 0.5 * (A + A.transpose()).eval();
  Mat L = Mat::Zero(n, n);
  L.bottomRightCorner(n - m, n - m) = -random_spd(rng, n - m);
  return hbl::LinearSystem({A}, L, m);
}

}  // namespace fixtures
