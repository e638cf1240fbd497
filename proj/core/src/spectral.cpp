#include "hbl/spectral.hpp"

#include "hbl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace hbl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Cluster {
  std::vector<int> members;
  cplx mean;
  double spread = 0.0;
};

std::vector<Cluster> single_linkage(const CVec& ev, double tol) {
  const int N = static_cast<int>(ev.size());
  std::vector<int> parent(N);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (std::abs(ev[i] - ev[j]) <= tol) parent[find(i)] = find(j);

  std::vector<Cluster> out;
  std::vector<int> slot(N, -1);
  for (int i = 0; i < N; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[root]].members.push_back(i);
  }
  for (auto& c : out) {
    cplx sum = 0.0;
    for (int i : c.members) sum += ev[i];
    c.mean = sum / double(c.members.size());
    for (int i : c.members) c.spread = std::max(c.spread, std::abs(ev[i] - c.mean));
  }
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (a.mean.imag() != b.mean.imag()) return a.mean.imag() < b.mean.imag();
    return a.mean.real() < b.mean.real();
  });
  return out;
}

// Rank threshold for deciding that M - μI has an α-dimensional kernel.
double kernel_threshold(double sigma_max, double spread) {
  return std::sqrt(kEps) * sigma_max + 10.0 * spread;
}

double condition_number(const CMat& V) {
  Eigen::JacobiSVD<CMat> svd(V);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

std::string describe(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

double default_cluster_tol(const CMat& M) { return 1e-6 * (1.0 + M.norm()); }

CVec eigenvalues(const CMat& M) { return Eigen::ComplexEigenSolver<CMat>(M, false).eigenvalues(); }

double spectral_abscissa(const CMat& M) { return eigenvalues(M).real().maxCoeff(); }

std::vector<EigenGroup> eig_grouped(const CMat& M, double cluster_tol) {
  const auto N = M.rows();
  if (M.cols() != N) throw ValidationError("eig_grouped needs a square matrix");
  if (!M.allFinite()) throw ValidationError("eig_grouped: matrix contains NaN or Inf");
  if (cluster_tol < 0.0) cluster_tol = default_cluster_tol(M);

  const CVec ev = eigenvalues(M);
  const auto clusters = single_linkage(ev, cluster_tol);
  const double scale = 1.0 + M.norm();

  CMat V(N, N);
  std::vector<EigenGroup> groups;
  Eigen::Index col = 0;
  for (const auto& c : clusters) {
    const int alpha = static_cast<int>(c.members.size());
    const CMat S = M - c.mean * CMat::Identity(N, N);
    Eigen::JacobiSVD<CMat> svd(S, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thr = kernel_threshold(sv[0], c.spread) + 1e3 * double(N) * kEps * scale;
    if (sv[N - alpha] > thr)
      throw NotSemisimple("eigenvalue " + describe(c.mean) + " has algebraic multiplicity " + std::to_string(alpha) +
                              " but a smaller eigenspace (not semi-simple)",
                          c.mean);
    EigenGroup g;
    g.value = c.mean;
    g.multiplicity = alpha;
    g.right = svd.matrixV().rightCols(alpha);
    V.middleCols(col, alpha) = g.right;
    col += alpha;
    groups.push_back(std::move(g));
  }

  const double cond = condition_number(V);
  if (!(cond < 1e10)) {
    // Blame the group contributing most to the near-null direction of V.
    Eigen::JacobiSVD<CMat> svd(V, Eigen::ComputeFullV);
    const CVec null_dir = svd.matrixV().col(N - 1);
    Eigen::Index start = 0;
    double best = -1.0;
    cplx culprit = groups.front().value;
    for (const auto& g : groups) {
      const double w = null_dir.segment(start, g.multiplicity).norm();
      if (w > best) {
        best = w;
        culprit = g.value;
      }
      start += g.multiplicity;
    }
    throw NotSemisimple("eigenvector matrix is numerically singular (condition number " + std::to_string(cond) +
                            "); eigenvalue " + describe(culprit) + " is not semi-simple",
                        culprit);
  }

  const CMat Vinv = V.fullPivLu().inverse();
  Eigen::Index start = 0;
  for (auto& g : groups) {
    g.left = Vinv.middleRows(start, g.multiplicity);
    start += g.multiplicity;
    const CMat block = g.left * M * g.right;
    const CMat res = M * g.right - g.right * block;
    g.residual = res.colwise().norm().maxCoeff();
  }
  return groups;
}

SemisimpleResult is_real_semisimple(const Mat& M, double imag_tol) {
  const auto N = M.rows();
  SemisimpleResult out;
  const CMat Mc = M.cast<cplx>();
  const CVec ev = eigenvalues(Mc);

  Eigen::Index worst = 0;
  ev.imag().cwiseAbs().maxCoeff(&worst);
  const double max_imag = std::abs(ev[worst].imag());
  if (max_imag >= imag_tol) {
    out.verdict = Verdict::fails;
    out.witness = ev[worst];
    out.margin = imag_tol - max_imag;
    return out;
  }
  out.margin = imag_tol - max_imag;

  const auto clusters = single_linkage(ev.real().cast<cplx>(), default_cluster_tol(Mc));
  CMat V(N, N);
  Eigen::Index col = 0;
  for (const auto& c : clusters) {
    const int alpha = static_cast<int>(c.members.size());
    out.multiplicities.push_back(alpha);
    out.values.push_back(c.mean.real());
    const double mu = c.mean.real();
    const Mat S = M - mu * Mat::Identity(N, N);
    Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    V.middleCols(col, alpha) = svd.matrixV().rightCols(alpha).cast<cplx>();
    col += alpha;
    if (alpha == 1) continue;  // simple eigenvalues are semi-simple

    const double smax = std::max(sv[0], std::numeric_limits<double>::min());
    const double thr = kernel_threshold(sv[0], c.spread) + double(N) * kEps * smax;
    const double s_alpha = sv[N - alpha];  // must vanish for a full eigenspace
    const double m = (thr - s_alpha) / smax;
    out.margin = std::min(out.margin, m);
    if (s_alpha > 10.0 * thr) {
      out.verdict = Verdict::fails;
      out.witness = cplx(mu, 0.0);
    } else if (s_alpha > 0.1 * thr && out.verdict != Verdict::fails) {
      out.verdict = Verdict::inconclusive;
      out.witness = cplx(mu, 0.0);
    }
  }
  if (out.verdict == Verdict::holds) {
    const double cond = condition_number(V);
    if (cond > 1e12) {
      out.verdict = Verdict::fails;
      out.margin = std::min(out.margin, -1.0 / cond);
    } else if (cond > 1e8) {
      out.verdict = Verdict::inconclusive;
    }
  }
  std::sort(out.multiplicities.begin(), out.multiplicities.end());
  if (out.verdict == Verdict::fails) out.margin = std::min(out.margin, -std::numeric_limits<double>::min());
  if (out.verdict != Verdict::fails) out.margin = std::max(out.margin, std::numeric_limits<double>::min());
  return out;
}

LyapunovResult lyapunov_symmetrizer(const CMat& M) {
  const auto N = M.rows();
  const CVec ev = eigenvalues(M);
  Eigen::Index k = 0;
  const double abscissa = ev.real().maxCoeff(&k);
  if (abscissa >= -1e-10)
    throw NotHurwitz("matrix is not Hurwitz: eigenvalue " + describe(ev[k]) + " has real part >= -1e-10", ev[k]);

  // Bartels-Stewart on the complex Schur form M = U T U^*:
  // T^* X + X T = -I with X = U^* D U, solved column by column.
  Eigen::ComplexSchur<CMat> schur(M);
  const CMat& T = schur.matrixT();
  const CMat& U = schur.matrixU();
  const CMat Tadj = T.adjoint();
  CMat X = CMat::Zero(N, N);
  for (Eigen::Index c = 0; c < N; ++c) {
    CVec rhs = -CVec::Unit(N, c);
    for (Eigen::Index j = 0; j < c; ++j) rhs -= X.col(j) * T(j, c);
    CMat lower = Tadj;
    lower.diagonal().array() += T(c, c);
    X.col(c) = lower.triangularView<Eigen::Lower>().solve(rhs);
  }
  CMat D = U * X * U.adjoint();
  D = 0.5 * (D + D.adjoint()).eval();

  LyapunovResult out;
  out.D = D;
  Eigen::SelfAdjointEigenSolver<CMat> es(D, Eigen::EigenvaluesOnly);
  out.lambda_min = es.eigenvalues().minCoeff();
  out.lambda_max = es.eigenvalues().maxCoeff();
  out.residual = (M.adjoint() * D + D * M + CMat::Identity(N, N)).norm();
  if (!(out.lambda_min > 0.0))
    throw NotHurwitz("Lyapunov solution is not positive definite (ill-conditioned spectrum)", ev[k]);
  return out;
}

BlockSymmetrizerResult common_block_symmetrizer(const std::vector<Mat>& A, int m, int r) {
  const int n = m + r;
  BlockSymmetrizerResult out;
  for (const auto& Aj : A)
    if (Aj.rows() != n || Aj.cols() != n) throw ValidationError("common_block_symmetrizer: block sizes do not match A^j");

  // Basis of symmetric block-diagonal matrices.
  std::vector<Mat> basis;
  auto add_block = [&](int off, int size) {
    for (int i = 0; i < size; ++i)
      for (int k = i; k < size; ++k) {
        Mat E = Mat::Zero(n, n);
        E(off + i, off + k) = 1.0;
        E(off + k, off + i) = 1.0;
        basis.push_back(std::move(E));
      }
  };
  add_block(0, m);
  add_block(m, r);
  const int p = static_cast<int>(basis.size());

  // Constraint rows: strict upper triangle of E A^j - (A^j)^t E, for all j.
  const int per = n * (n - 1) / 2;
  Mat C = Mat::Zero(per * static_cast<int>(A.size()), p);
  double scale = 1.0;
  for (const auto& Aj : A) scale = std::max(scale, Aj.cwiseAbs().maxCoeff());
  for (int q = 0; q < p; ++q) {
    int row = 0;
    for (const auto& Aj : A) {
      const Mat W = basis[q] * Aj - Aj.transpose() * basis[q];
      for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) C(row++, q) = W(i, k);
    }
  }

  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * scale * std::max(1.0, sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  const int k = p - rank;
  out.nullspace_dim = k;
  if (k == 0) {
    out.status = BlockSymmetrizerResult::Status::none;
    out.note = "only the zero matrix symmetrizes all A^j with the prescribed block structure";
    return out;
  }
  if (k > 10) {
    out.status = BlockSymmetrizerResult::Status::inconclusive;
    out.note = "nullspace dimension " + std::to_string(k) + " exceeds the supported search size 10";
    return out;
  }

  std::vector<Mat> N(k);
  for (int i = 0; i < k; ++i) {
    N[i] = Mat::Zero(n, n);
    const Vec coeff = svd.matrixV().col(rank + i);
    for (int q = 0; q < p; ++q) N[i] += coeff[q] * basis[q];
  }
  auto combine = [&](const Vec& c) {
    Mat S = Mat::Zero(n, n);
    for (int i = 0; i < k; ++i) S += c[i] * N[i];
    return S;
  };
  auto lam_min = [&](const Vec& c, Vec* vec) {
    Eigen::SelfAdjointEigenSolver<Mat> es(combine(c));
    if (vec) *vec = es.eigenvectors().col(0);
    return es.eigenvalues()[0];
  };

  // λ_min(Σ c_i N_i) is concave and positively homogeneous: a coarse sphere
  // sample followed by supergradient ascent decides whether it can be positive.
  std::vector<Vec> starts;
  for (int i = 0; i < k; ++i)
    for (double s : {1.0, -1.0}) starts.push_back(s * Vec::Unit(k, i));
  if (k == 2) {
    for (int a = 0; a < 64; ++a) {
      const double t = 2.0 * M_PI * a / 64.0;
      starts.push_back(Vec((Vec(2) << std::cos(t), std::sin(t)).finished()));
    }
  } else if (k > 2) {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> g;
    for (int s = 0; s < 200 * k; ++s) {
      Vec c(k);
      for (int i = 0; i < k; ++i) c[i] = g(rng);
      starts.push_back(c.normalized());
    }
  }
  Vec best = starts.front();
  double best_val = -std::numeric_limits<double>::infinity();
  for (const auto& c : starts) {
    const double v = lam_min(c, nullptr);
    if (v > best_val) {
      best_val = v;
      best = c;
    }
  }
  Vec c = best;
  for (int it = 0; it < 400 && k > 1; ++it) {
    Vec v;
    lam_min(c, &v);
    Vec g(k);
    for (int i = 0; i < k; ++i) g[i] = v.dot(N[i] * v);
    const double step = 0.5 / std::sqrt(1.0 + it);
    c = (c + step * g).normalized();
    const double val = lam_min(c, nullptr);
    if (val > best_val) {
      best_val = val;
      best = c;
    }
  }

  if (best_val > 1e-9) {
    Mat S = combine(best);
    S /= S(0, 0);
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    out.status = BlockSymmetrizerResult::Status::found;
    out.min_eigenvalue = es.eigenvalues()[0];
    out.S = std::move(S);
    return out;
  }
  out.status = BlockSymmetrizerResult::Status::none;
  out.min_eigenvalue = best_val;
  out.note = "no positive definite combination found in the " + std::to_string(k) +
             "-dimensional solution space (search result; a sound certificate only together with a structural test)";
  return out;
}

}  // namespace hbl
