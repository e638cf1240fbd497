#include "hbl/grids.hpp"

#include "hbl/errors.hpp"

#include <cmath>
#include <random>

namespace hbl {

SphereGrid SphereGrid::make(int dim, int density, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("sphere grid dimension must be positive");
  SphereGrid g;
  g.dim = dim;
  if (dim == 1) {
    g.density = 2;
    g.points = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    return g;
  }
  if (density <= 0) density = dim == 2 ? 720 : 2000;
  g.density = density;
  g.points.reserve(density);
  if (dim == 2) {
    for (int k = 0; k < density; ++k) {
      const double t = 2.0 * M_PI * k / density;
      Vec w(2);
      w << std::cos(t), std::sin(t);
      g.points.push_back(w);
    }
  } else if (dim == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < density; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / density;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * k;
      Vec w(3);
      w << rad * std::cos(phi), rad * std::sin(phi), z;
      g.points.push_back(w / w.norm());
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (int k = 0; k < density; ++k) {
      Vec w(dim);
      do {
        for (int i = 0; i < dim; ++i) w[i] = nd(rng);
      } while (w.norm() < 1e-8);
      g.points.push_back(w / w.norm());
    }
  }
  return g;
}

RadialGrid RadialGrid::make(double r_min, double r_max, int count) {
  if (!(r_min > 0.0) || !(r_max > r_min) || count < 2)
    throw ValidationError("radial grid needs 0 < min < max and at least 2 points");
  RadialGrid g;
  g.r_min = r_min;
  g.r_max = r_max;
  g.count = count;
  const double a = std::log(r_min), b = std::log(r_max);
  for (int k = 0; k < count; ++k) g.radii.push_back(std::exp(a + (b - a) * k / (count - 1)));
  g.radii.front() = r_min;
  g.radii.back() = r_max;
  g.guards = {std::min(1e-6, r_min * 1e-3), std::max(1e6, r_max * 1e3)};
  return g;
}

std::vector<double> linear_times(double t_max, int count) {
  std::vector<double> t(count);
  for (int k = 0; k < count; ++k) t[k] = count == 1 ? t_max : t_max * k / (count - 1);
  return t;
}

double rho(double tau) { return tau * tau / (1.0 + tau * tau); }

}  // namespace hbl
