#pragma once

#include "hbl/poly.hpp"
#include "hbl/types.hpp"

#include <optional>
#include <vector>

namespace hbl {

// U_t + sum_j f^j(U)_{x_j} = Q(U) around an equilibrium, with Q = (0_m, q).
struct BalanceLawSpec {
  int dim = 1;
  int n = 0;
  int m = 0;
  Vec equilibrium;
  std::vector<Mat> flux_jacobians;  // A^j = Df^j(equilibrium), n x n each
  Mat source_jacobian;              // DQ(equilibrium), first m rows zero
  std::optional<std::vector<PolyMap>> flux_poly;

  int r() const { return n - m; }

  // Throws ValidationError on any violated structural invariant.
  void validate() const;
};

// Constant-coefficient linearization U_t + sum A^j U_{x_j} = 𝓛 U.
class LinearSystem {
 public:
  LinearSystem(std::vector<Mat> flux, Mat source, int m);

  int dim() const { return static_cast<int>(flux_.size()); }
  int n() const { return static_cast<int>(source_.rows()); }
  int m() const { return m_; }
  int r() const { return n() - m_; }

  const std::vector<Mat>& flux() const { return flux_; }
  const Mat& source() const { return source_; }
  Mat L_block() const { return source_.bottomRightCorner(r(), r()); }

  // True when the source is diag(0, L), i.e. q_u vanishes.
  bool in_normal_form(double tol = 0.0) const;

  // A(ω) = sum_j A^j ω_j (any real vector, not only unit ones).
  Mat symbol(const Vec& omega) const;
  // 𝓜(ξ) = -i A(ξ) + 𝓛.
  CMat dispersion(const Vec& xi) const;

  Mat A11(const Vec& omega) const;
  Mat A12(const Vec& omega) const;
  Mat A21(const Vec& omega) const;
  Mat A22(const Vec& omega) const;
  // A12(ω) L^{-1} A21(ω).
  Mat reduced_coupling(const Vec& omega) const;

 private:
  std::vector<Mat> flux_;
  Mat source_;
  int m_;
};

struct JinXinSpec {
  int dim = 1;
  int m = 1;
  std::vector<Mat> b;         // symmetric positive definite wave-speed matrices
  double eps = 1.0;           // relaxation rate
  std::vector<Mat> flux_jac;  // K^j = D_u F^j at the rest state
  std::optional<std::vector<PolyMap>> flux_poly;  // F^j : R^m -> R^m

  int n() const { return m * (dim + 1); }

  void validate() const;

  Mat K(const Vec& xi) const;            // sum_j K^j ξ_j
  Mat B_calligraphic(const Vec& xi) const;  // 𝓑(ξ) = sum_j b^j ξ_j^2
  Mat B_stack(const Vec& omega) const;   // (ω_1 b^1; ...; ω_d b^d), md x m
  Mat Omega(const Vec& omega) const;     // (ω_1 I; ...; ω_d I), md x m
  Mat stacked_flux_jac() const;          // (K^1; ...; K^d), md x m
};

// Coefficients of u_tt - sum b^j u_{x_j x_j} + damping u_t + sum C^j u_{x_j} = 0.
struct WaveCoefficients {
  std::vector<Mat> b;
  Mat damping;
  std::vector<Mat> convection;

  // Quadratic pencil λ^2 I + λ damping + 𝓑(ξ) + i C(ξ).
  CMat pencil(cplx lambda, const Vec& xi) const;
  // The 2m roots of det(pencil) = 0, via companion linearization.
  CVec pencil_roots(const Vec& xi) const;
};

LinearSystem linearize(const BalanceLawSpec& spec);

// Linear-level normal form: T = [[I, 0], [-q_v^{-1} q_u, I]], Ã^j = T^{-1} A^j T,
// 𝓛 = diag(0, q_v). Throws NotTransformable if q_v is numerically singular.
LinearSystem normal_form(const LinearSystem& sys);
LinearSystem to_normal_form(const BalanceLawSpec& spec);

BalanceLawSpec build_jinxin(const JinXinSpec& jx);
LinearSystem jinxin_normal_form(const JinXinSpec& jx);
WaveCoefficients second_order_reduction(const JinXinSpec& jx);

}  // namespace hbl
