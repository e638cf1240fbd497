#include "hbl/expm.hpp"

#include "hbl/errors.hpp"

#include <cmath>

namespace hbl {

namespace {

constexpr double kTheta13 = 5.371920351148152;

constexpr double kPade13[] = {64764752532480000.0,
                              32382376266240000.0,
                              7771770303897600.0,
                              1187353796428800.0,
                              129060195264000.0,
                              10559470521600.0,
                              670442572800.0,
                              33522128640.0,
                              1323241920.0,
                              40840800.0,
                              960960.0,
                              16380.0,
                              182.0,
                              1.0};

double norm1(const CMat& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

CMat expm(const CMat& M) {
  const auto N = M.rows();
  if (M.cols() != N) throw ValidationError("expm needs a square matrix");
  if (N == 0) return M;
  if (!M.allFinite()) throw ValidationError("expm: matrix contains NaN or Inf");

  const double nrm = norm1(M);
  int s = 0;
  if (nrm > kTheta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
  const CMat A = M / std::ldexp(1.0, s);

  const CMat I = CMat::Identity(N, N);
  const CMat A2 = A * A;
  const CMat A4 = A2 * A2;
  const CMat A6 = A4 * A2;
  const double* b = kPade13;

  const CMat Uin = A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I;
  const CMat U = A * Uin;
  const CMat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

  CMat R = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < s; ++k) R = (R * R).eval();
  return R;
}

}  // namespace hbl
