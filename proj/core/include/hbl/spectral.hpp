#pragma once

#include "hbl/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hbl {

// One cluster of eigenvalues of a matrix M together with a basis of its
// invariant subspace (right) and the dual basis (left): left * right = I.
struct EigenGroup {
  cplx value;        // cluster representative (mean of the member eigenvalues)
  int multiplicity;  // algebraic multiplicity of the cluster
  CMat right;        // N x multiplicity
  CMat left;         // multiplicity x N
  double residual;   // max column norm of M*right - right*(left*M*right)

  CMat projector() const { return right * left; }
  // left * X * right
  CMat project(const CMat& X) const { return left * X * right; }
};

double default_cluster_tol(const CMat& M);

// Clusters eigenvalues by single linkage at distance `cluster_tol` (negative
// selects the default) and returns groups sorted by imaginary then real part.
// Throws NotSemisimple if a cluster is defective or the assembled eigenvector
// matrix is too ill-conditioned to invert.
std::vector<EigenGroup> eig_grouped(const CMat& M, double cluster_tol = -1.0);

CVec eigenvalues(const CMat& M);
double spectral_abscissa(const CMat& M);

struct SemisimpleResult {
  Verdict verdict = Verdict::holds;
  cplx witness{};
  double margin = 0.0;
  std::vector<int> multiplicities;  // sorted multiset of cluster sizes
  std::vector<double> values;       // cluster representatives (real parts)

  bool ok() const { return verdict == Verdict::holds; }
};

// Real spectrum (|Im| < imag_tol) with geometric == algebraic multiplicity.
// Borderline rank decisions come back inconclusive, never ok.
SemisimpleResult is_real_semisimple(const Mat& M, double imag_tol = 1e-8);

struct LyapunovResult {
  CMat D;  // Hermitian positive definite, M^* D + D M = -I
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double residual = 0.0;  // ||M^* D + D M + I||_F
};

// Throws NotHurwitz when the spectral abscissa of M is >= -1e-10.
LyapunovResult lyapunov_symmetrizer(const CMat& M);

struct BlockSymmetrizerResult {
  enum class Status { found, none, inconclusive };
  Status status = Status::none;
  std::optional<Mat> S;  // block-diagonal SPD with S A^j symmetric, scaled so S(0,0) = 1
  int nullspace_dim = 0;
  double min_eigenvalue = 0.0;
  std::string note;
};

// Searches for S = diag(S1, S2) (S1 m x m, S2 r x r, symmetric positive
// definite) such that every S A^j is symmetric.
BlockSymmetrizerResult common_block_symmetrizer(const std::vector<Mat>& A, int m, int r);

}  // namespace hbl
