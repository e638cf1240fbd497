#pragma once

#include "hbl/types.hpp"

namespace hbl {

// exp(M) by scaling and squaring with a degree-13 Padé approximant.
CMat expm(const CMat& M);

inline CMat expm(const CMat& M, double t) { return expm((M * t).eval()); }

}  // namespace hbl
