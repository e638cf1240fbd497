#include "hbl/poly.hpp"

#include "hbl/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace hbl {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

PolyMap::PolyMap(int inputs, std::vector<std::vector<Monomial>> terms)
    : inputs_(inputs), terms_(std::move(terms)) {
  if (inputs_ < 1) throw ValidationError("polynomial map needs at least one input");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    for (const auto& t : terms_[i]) {
      if (static_cast<int>(t.powers.size()) != inputs_)
        throw ValidationError("monomial in component " + std::to_string(i) + " has " +
                              std::to_string(t.powers.size()) + " exponents, expected " +
                              std::to_string(inputs_));
      int deg = 0;
      for (int p : t.powers) {
        if (p < 0) throw ValidationError("negative exponent in polynomial flux");
        deg += p;
      }
      if (deg > kMaxDegree)
        throw ValidationError("polynomial flux term of total degree " + std::to_string(deg) +
                              " exceeds the supported maximum 4");
      if (!std::isfinite(t.coeff)) throw ValidationError("non-finite polynomial coefficient");
    }
  }
}

PolyMap PolyMap::linear(const Mat& J) {
  std::vector<std::vector<Monomial>> terms(J.rows());
  for (int i = 0; i < J.rows(); ++i) {
    for (int k = 0; k < J.cols(); ++k) {
      if (J(i, k) == 0.0) continue;
      Monomial t;
      t.coeff = J(i, k);
      t.powers.assign(J.cols(), 0);
      t.powers[k] = 1;
      terms[i].push_back(std::move(t));
    }
  }
  return PolyMap(static_cast<int>(J.cols()), std::move(terms));
}

int PolyMap::degree() const {
  int deg = 0;
  for (const auto& comp : terms_)
    for (const auto& t : comp) deg = std::max(deg, std::accumulate(t.powers.begin(), t.powers.end(), 0));
  return deg;
}

Vec PolyMap::eval(const Vec& x) const {
  Vec out(outputs());
  eval_into(std::span<const double>(x.data(), x.size()), std::span<double>(out.data(), out.size()));
  return out;
}

void PolyMap::eval_into(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    double acc = 0.0;
    for (const auto& t : terms_[i]) {
      double v = t.coeff;
      for (int k = 0; k < inputs_; ++k)
        if (t.powers[k] != 0) v *= ipow(x[k], t.powers[k]);
      acc += v;
    }
    out[i] = acc;
  }
}

Mat PolyMap::jacobian(const Vec& x) const {
  Mat J = Mat::Zero(outputs(), inputs_);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    for (const auto& t : terms_[i]) {
      for (int k = 0; k < inputs_; ++k) {
        if (t.powers[k] == 0) continue;
        double v = t.coeff * t.powers[k];
        for (int l = 0; l < inputs_; ++l) {
          const int p = (l == k) ? t.powers[l] - 1 : t.powers[l];
          if (p != 0) v *= ipow(x[l], p);
        }
        J(static_cast<Eigen::Index>(i), k) += v;
      }
    }
  }
  return J;
}

}  // namespace hbl
