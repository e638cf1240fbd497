#pragma once

#include "hbl/decay.hpp"

namespace hbl::detail {

struct AsymptoticLimit {
  double rate = 0.0;  // -max Re over the sphere; NaN if undefined
  Vec omega;
  cplx eigenvalue{};
  std::string note;
};

// ξ -> 0: ζ from the eigen-groups of A11(ω) in normal form.
AsymptoticLimit small_frequency_limit(const LinearSystem& sys, const SphereGrid& grid);
// ξ -> ∞: β from the eigen-groups of A(ω).
AsymptoticLimit large_frequency_limit(const LinearSystem& sys, const SphereGrid& grid);

double norm2(const CMat& M);

}  // namespace hbl::detail
