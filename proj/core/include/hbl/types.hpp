#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string_view>
#include <vector>

namespace hbl {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

enum class Verdict { holds, fails, inconclusive };

std::string_view to_string(Verdict v);

// Weakest of two verdicts: fails < inconclusive < holds.
Verdict weakest(Verdict a, Verdict b);

}  // namespace hbl
