#pragma once

#include "hbl/types.hpp"

#include <span>
#include <vector>

namespace hbl {

struct Monomial {
  double coeff = 0.0;
  std::vector<int> powers;  // one exponent per input variable
};

// Polynomial vector field R^inputs -> R^outputs given as a coefficient table.
// Jacobians are obtained by exact differentiation of the monomials.
class PolyMap {
 public:
  static constexpr int kMaxDegree = 4;

  PolyMap() = default;
  PolyMap(int inputs, std::vector<std::vector<Monomial>> terms);

  // Linear map x -> J x as a degree-1 table.
  static PolyMap linear(const Mat& J);

  int inputs() const { return inputs_; }
  int outputs() const { return static_cast<int>(terms_.size()); }
  int degree() const;
  const std::vector<std::vector<Monomial>>& terms() const { return terms_; }

  Vec eval(const Vec& x) const;
  void eval_into(std::span<const double> x, std::span<double> out) const;
  Mat jacobian(const Vec& x) const;

 private:
  int inputs_ = 0;
  std::vector<std::vector<Monomial>> terms_;
};

}  // namespace hbl
