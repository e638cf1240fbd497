#include "hbl/model.hpp"

#include "hbl/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hbl {

namespace {

void require_finite(const Mat& M, const std::string& what) {
  if (!M.allFinite()) throw ValidationError(what + " contains NaN or Inf");
}

void require_shape(const Mat& M, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (M.rows() != rows || M.cols() != cols)
    throw ValidationError(what + " has shape " + std::to_string(M.rows()) + "x" + std::to_string(M.cols()) +
                          ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace

void BalanceLawSpec::validate() const {
  if (dim < 1) throw ValidationError("spatial dimension must be >= 1");
  if (m < 1 || m >= n) throw ValidationError("need 1 <= m < n (got m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  if (equilibrium.size() != n) throw ValidationError("equilibrium has length " + std::to_string(equilibrium.size()) + ", expected " + std::to_string(n));
  if (!equilibrium.allFinite()) throw ValidationError("equilibrium contains NaN or Inf");
  if (static_cast<int>(flux_jacobians.size()) != dim)
    throw ValidationError("expected " + std::to_string(dim) + " flux Jacobians, got " + std::to_string(flux_jacobians.size()));
  for (int j = 0; j < dim; ++j) {
    require_shape(flux_jacobians[j], n, n, "A^" + std::to_string(j + 1));
    require_finite(flux_jacobians[j], "A^" + std::to_string(j + 1));
  }
  require_shape(source_jacobian, n, n, "DQ");
  require_finite(source_jacobian, "DQ");
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k)
      if (source_jacobian(i, k) != 0.0)
        throw ValidationError("DQ row " + std::to_string(i + 1) + " belongs to the conserved block and must vanish");

  if (flux_poly) {
    if (static_cast<int>(flux_poly->size()) != dim) throw ValidationError("flux_poly must have one map per direction");
    for (int j = 0; j < dim; ++j) {
      const auto& f = (*flux_poly)[j];
      if (f.inputs() != n || f.outputs() != n) throw ValidationError("flux_poly map " + std::to_string(j + 1) + " must be R^n -> R^n");
      const double dev = (f.jacobian(equilibrium) - flux_jacobians[j]).cwiseAbs().maxCoeff();
      if (dev > 1e-10)
        throw ValidationError("flux_poly Jacobian at the equilibrium differs from A^" + std::to_string(j + 1) + " by " + std::to_string(dev));
    }
  }
}

LinearSystem::LinearSystem(std::vector<Mat> flux, Mat source, int m)
    : flux_(std::move(flux)), source_(std::move(source)), m_(m) {
  const auto n = source_.rows();
  if (flux_.empty()) throw ValidationError("linear system needs at least one flux matrix");
  if (source_.cols() != n) throw ValidationError("source matrix must be square");
  if (m_ < 1 || m_ >= n) throw ValidationError("need 1 <= m < n");
  for (std::size_t j = 0; j < flux_.size(); ++j) require_shape(flux_[j], n, n, "A^" + std::to_string(j + 1));
  if (!source_.topRows(m_).isZero(0.0)) throw ValidationError("first m rows of the source must vanish");
}

bool LinearSystem::in_normal_form(double tol) const {
  return source_.bottomLeftCorner(r(), m_).cwiseAbs().maxCoeff() <= tol;
}

Mat LinearSystem::symbol(const Vec& omega) const {
  if (omega.size() != dim()) throw ValidationError("frequency vector has wrong dimension");
  Mat A = Mat::Zero(n(), n());
  for (int j = 0; j < dim(); ++j) A += omega[j] * flux_[j];
  return A;
}

CMat LinearSystem::dispersion(const Vec& xi) const {
  return -kI * symbol(xi).cast<cplx>() + source_.cast<cplx>();
}

Mat LinearSystem::A11(const Vec& omega) const { return symbol(omega).topLeftCorner(m_, m_); }
Mat LinearSystem::A12(const Vec& omega) const { return symbol(omega).topRightCorner(m_, r()); }
Mat LinearSystem::A21(const Vec& omega) const { return symbol(omega).bottomLeftCorner(r(), m_); }
Mat LinearSystem::A22(const Vec& omega) const { return symbol(omega).bottomRightCorner(r(), r()); }

Mat LinearSystem::reduced_coupling(const Vec& omega) const {
  const Mat A = symbol(omega);
  return A.topRightCorner(m_, r()) * L_block().partialPivLu().solve(A.bottomLeftCorner(r(), m_));
}

void JinXinSpec::validate() const {
  if (dim < 1) throw ValidationError("Jin-Xin dimension must be >= 1");
  if (m < 1) throw ValidationError("Jin-Xin block size m must be >= 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("relaxation rate eps must be positive and finite");
  if (static_cast<int>(b.size()) != dim) throw ValidationError("expected " + std::to_string(dim) + " matrices b^j");
  if (static_cast<int>(flux_jac.size()) != dim) throw ValidationError("expected " + std::to_string(dim) + " matrices K^j");
  for (int j = 0; j < dim; ++j) {
    const std::string name = "b^" + std::to_string(j + 1);
    require_shape(b[j], m, m, name);
    require_finite(b[j], name);
    if ((b[j] - b[j].transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ValidationError(name + " is not symmetric");
    if (Eigen::LLT<Mat>(b[j]).info() != Eigen::Success) throw ValidationError(name + " is not positive definite");
    require_shape(flux_jac[j], m, m, "K^" + std::to_string(j + 1));
    require_finite(flux_jac[j], "K^" + std::to_string(j + 1));
  }
  // 𝓑(ω) > 0 is implied by b^j > 0; spot-check a diagonal direction.
  const Vec diag_dir = Vec::Ones(dim) / std::sqrt(static_cast<double>(dim));
  if (Eigen::LLT<Mat>(B_calligraphic(diag_dir)).info() != Eigen::Success)
    throw ValidationError("𝓑(ω) is not positive definite");

  if (flux_poly) {
    if (static_cast<int>(flux_poly->size()) != dim) throw ValidationError("flux_poly must have one map per direction");
    const Vec zero = Vec::Zero(m);
    for (int j = 0; j < dim; ++j) {
      const auto& F = (*flux_poly)[j];
      if (F.inputs() != m || F.outputs() != m) throw ValidationError("Jin-Xin flux_poly maps must be R^m -> R^m");
      if (F.eval(zero).cwiseAbs().maxCoeff() > 1e-12) throw ValidationError("Jin-Xin flux must vanish at the rest state u = 0");
      const double dev = (F.jacobian(zero) - flux_jac[j]).cwiseAbs().maxCoeff();
      if (dev > 1e-10) throw ValidationError("flux_poly Jacobian at u = 0 differs from K^" + std::to_string(j + 1));
    }
  }
}

Mat JinXinSpec::K(const Vec& xi) const {
  Mat out = Mat::Zero(m, m);
  for (int j = 0; j < dim; ++j) out += xi[j] * flux_jac[j];
  return out;
}

Mat JinXinSpec::B_calligraphic(const Vec& xi) const {
  Mat out = Mat::Zero(m, m);
  for (int j = 0; j < dim; ++j) out += xi[j] * xi[j] * b[j];
  return out;
}

Mat JinXinSpec::B_stack(const Vec& omega) const {
  Mat out(m * dim, m);
  for (int j = 0; j < dim; ++j) out.middleRows(j * m, m) = omega[j] * b[j];
  return out;
}

Mat JinXinSpec::Omega(const Vec& omega) const {
  Mat out(m * dim, m);
  for (int j = 0; j < dim; ++j) out.middleRows(j * m, m) = omega[j] * Mat::Identity(m, m);
  return out;
}

Mat JinXinSpec::stacked_flux_jac() const {
  Mat out(m * dim, m);
  for (int j = 0; j < dim; ++j) out.middleRows(j * m, m) = flux_jac[j];
  return out;
}

CMat WaveCoefficients::pencil(cplx lambda, const Vec& xi) const {
  const auto m = damping.rows();
  CMat P = lambda * lambda * CMat::Identity(m, m) + lambda * damping.cast<cplx>();
  for (std::size_t j = 0; j < b.size(); ++j)
    P += (xi[j] * xi[j]) * b[j].cast<cplx>() + kI * xi[j] * convection[j].cast<cplx>();
  return P;
}

CVec WaveCoefficients::pencil_roots(const Vec& xi) const {
  const auto m = damping.rows();
  // λ = s μ keeps the companion entries O(1) at large |ξ|.
  const double s = std::max(1.0, xi.norm());
  CMat stiff = CMat::Zero(m, m);
  for (std::size_t j = 0; j < b.size(); ++j)
    stiff += (xi[j] * xi[j] / (s * s)) * b[j].cast<cplx>() + kI * (xi[j] / (s * s)) * convection[j].cast<cplx>();
  CMat companion = CMat::Zero(2 * m, 2 * m);
  companion.topRightCorner(m, m) = CMat::Identity(m, m);
  companion.bottomLeftCorner(m, m) = -stiff;
  companion.bottomRightCorner(m, m) = -damping.cast<cplx>() / s;
  return s * Eigen::ComplexEigenSolver<CMat>(companion, false).eigenvalues();
}

LinearSystem linearize(const BalanceLawSpec& spec) {
  spec.validate();
  return LinearSystem(spec.flux_jacobians, spec.source_jacobian, spec.m);
}

LinearSystem normal_form(const LinearSystem& sys) {
  const int m = sys.m();
  const int r = sys.r();
  const int n = sys.n();
  const Mat qu = sys.source().bottomLeftCorner(r, m);
  const Mat qv = sys.L_block();
  Eigen::JacobiSVD<Mat> svd(qv);
  const auto& sv = svd.singularValues();
  const double cond = sv[r - 1] > 0.0 ? sv[0] / sv[r - 1] : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12))
    throw NotTransformable("q_v at the equilibrium is singular (condition number " + std::to_string(cond) +
                           "); the source violates (RH) and admits no normal form");

  const Mat G = qv.partialPivLu().solve(qu);  // q_v^{-1} q_u
  Mat T = Mat::Identity(n, n);
  Mat Tinv = Mat::Identity(n, n);
  T.bottomLeftCorner(r, m) = -G;
  Tinv.bottomLeftCorner(r, m) = G;

  std::vector<Mat> flux;
  flux.reserve(sys.dim());
  for (const auto& A : sys.flux()) flux.push_back(Tinv * A * T);
  Mat L = Mat::Zero(n, n);
  L.bottomRightCorner(r, r) = qv;
  return LinearSystem(std::move(flux), std::move(L), m);
}

LinearSystem to_normal_form(const BalanceLawSpec& spec) { return normal_form(linearize(spec)); }

BalanceLawSpec build_jinxin(const JinXinSpec& jx) {
  jx.validate();
  const int d = jx.dim;
  const int m = jx.m;
  const int n = jx.n();
  BalanceLawSpec spec;
  spec.dim = d;
  spec.n = n;
  spec.m = m;
  spec.equilibrium = Vec::Zero(n);
  std::vector<PolyMap> fluxes;
  for (int j = 0; j < d; ++j) {
    Mat A = Mat::Zero(n, n);
    A.block(0, m + j * m, m, m) = Mat::Identity(m, m);  // (E^j)^t
    A.block(m + j * m, 0, m, m) = jx.b[j];             // B^j
    fluxes.push_back(PolyMap::linear(A));
    spec.flux_jacobians.push_back(std::move(A));
  }
  spec.flux_poly = std::move(fluxes);
  spec.source_jacobian = Mat::Zero(n, n);
  spec.source_jacobian.bottomLeftCorner(n - m, m) = jx.stacked_flux_jac() / jx.eps;
  spec.source_jacobian.bottomRightCorner(n - m, n - m) = -Mat::Identity(n - m, n - m) / jx.eps;
  return spec;
}

LinearSystem jinxin_normal_form(const JinXinSpec& jx) {
  const BalanceLawSpec spec = build_jinxin(jx);
  const int m = jx.m;
  const int n = jx.n();
  const Mat DF = jx.stacked_flux_jac();
  Mat T = Mat::Identity(n, n);
  Mat Tinv = Mat::Identity(n, n);
  T.bottomLeftCorner(n - m, m) = DF;
  Tinv.bottomLeftCorner(n - m, m) = -DF;

  std::vector<Mat> flux;
  for (const auto& A : spec.flux_jacobians) flux.push_back(Tinv * A * T);
  Mat L = Mat::Zero(n, n);
  L.bottomRightCorner(n - m, n - m) = -Mat::Identity(n - m, n - m) / jx.eps;
  LinearSystem sys(std::move(flux), std::move(L), m);

  // Block identities: A11 = K(ω), A12 L^{-1} A21 = eps (K(ω)^2 - 𝓑(ω)).
  for (int j = 0; j <= jx.dim; ++j) {
    Vec w = (j < jx.dim) ? Vec(Vec::Unit(jx.dim, j)) : Vec(Vec::Ones(jx.dim) / std::sqrt(double(jx.dim)));
    const Mat Kw = jx.K(w);
    const double scale = 1.0 + Kw.norm() * Kw.norm() + jx.B_calligraphic(w).norm();
    const double e1 = (sys.A11(w) - Kw).norm();
    const double e2 = (sys.reduced_coupling(w) - jx.eps * (Kw * Kw - jx.B_calligraphic(w))).norm();
    if (e1 > 1e-12 * scale || e2 > 1e-10 * scale)
      throw std::logic_error("Jin-Xin normal form block identity violated");
  }
  return sys;
}

WaveCoefficients second_order_reduction(const JinXinSpec& jx) {
  jx.validate();
  WaveCoefficients w;
  w.b = jx.b;
  w.damping = Mat::Identity(jx.m, jx.m) / jx.eps;
  for (const auto& K : jx.flux_jac) w.convection.push_back(K / jx.eps);
  return w;
}

}  // namespace hbl
