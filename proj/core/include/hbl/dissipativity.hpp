#pragma once

#include "hbl/grids.hpp"
#include "hbl/model.hpp"
#include "hbl/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hbl {

struct Witness {
  Vec point;  // ω or ξ
  cplx eigenvalue{};
  double margin = 0.0;
  std::string detail;
};

struct GridInfo {
  int dim = 0;
  int sphere_points = 0;
  double radial_min = 0.0;
  double radial_max = 0.0;
  int radial_count = 0;
};

struct CurvePoint {
  double radius;
  double worst_real;  // max Re spec over the sphere at this radius
};

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::holds;
  double margin = 0.0;  // <= 0 exactly when verdict == fails
  std::vector<Witness> witnesses;
  GridInfo grid;
  std::vector<CurvePoint> curve;
  std::vector<std::string> notes;
};

using MatrixFamily = std::function<CMat(const Vec&)>;

// (SC)': every eigen-group block J_L h J_R of H(ω) has spectrum in Re < -tol.
ConditionReport stable_compat(const MatrixFamily& H, const MatrixFamily& h, const SphereGrid& grid,
                              double tol = 1e-8, const std::string& name = "SC");

ConditionReport check_H(const LinearSystem& sys, const SphereGrid& grid);
ConditionReport check_RH(const BalanceLawSpec& spec);
ConditionReport check_RH(const LinearSystem& sys);
ConditionReport check_K(const LinearSystem& sys, const SphereGrid& grid);
ConditionReport check_D1(const LinearSystem& sys, const RadialGrid& rgrid, const SphereGrid& sgrid);
// Throws ValidationError unless sys is in normal form.
ConditionReport check_D2(const LinearSystem& sys, const SphereGrid& grid, double tol = 1e-8);
ConditionReport check_D3(const LinearSystem& sys, const SphereGrid& grid, double tol = 1e-8);

struct JinXinReport {
  ConditionReport d1;     // (D1)_2, pencil roots
  ConditionReport d2;     // (D2)_2
  ConditionReport d3;     // (D3)_2
  ConditionReport disp2;  // strict dissipation inequality on (δ_jk b^j - K^j K^k)
  bool sufficient_applicable = false;  // every b^j a multiple of I
  bool sufficient_consistent = true;   // disp2 holds and applicable => d1, d2, d3 hold
  std::vector<std::string> notes;
};

JinXinReport check_jinxin(const JinXinSpec& jx, const RadialGrid& rgrid, const SphereGrid& sgrid,
                          double tol = 1e-8);

// Symmetric positive definite square root with a condition-number guard.
Mat spd_sqrt(const Mat& B, double max_cond = 1e10);

}  // namespace hbl
