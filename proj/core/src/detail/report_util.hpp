#pragma once

#include "hbl/dissipativity.hpp"

#include <functional>
#include <string>

namespace hbl::detail {

// Clamps the margin sign to the verdict and guarantees a witness on failure.
void finalize(ConditionReport& rep);
GridInfo sphere_info(const SphereGrid& g);
std::string fmt_point(const Vec& p);
std::string fmt_cplx(cplx z);

// Pattern search minimizing f over the unit sphere, starting at w0.
Vec refine_on_sphere(const Vec& w0, double step, const std::function<double(const Vec&)>& f, double& best);
// Pattern search minimizing f over R^d with steps relative to |x|.
Vec refine_in_space(const Vec& x0, double rel_step, const std::function<double(const Vec&)>& f, double& best);

ConditionReport jinxin_d1(const JinXinSpec& jx, const RadialGrid& rg, const SphereGrid& sg);

}  // namespace hbl::detail
