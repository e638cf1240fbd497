#pragma once

#include "hbl/types.hpp"

#include <cstdint>
#include <vector>

namespace hbl {

struct SphereGrid {
  int dim = 1;
  int density = 0;  // requested point count (ignored for dim = 1)
  std::vector<Vec> points;

  // dim 1: {+1, -1}; dim 2: `density` equally spaced angles (default 720);
  // dim 3: Fibonacci sphere (default 2000); higher: seeded Gaussian directions.
  static SphereGrid make(int dim, int density = 0, std::uint64_t seed = 1);
};

struct RadialGrid {
  double r_min = 1e-3;
  double r_max = 1e3;
  int count = 61;
  std::vector<double> radii;
  std::vector<double> guards{1e-6, 1e6};

  static RadialGrid make(double r_min = 1e-3, double r_max = 1e3, int count = 61);
};

// Times 0 = t_0 < ... spread linearly over [0, t_max].
std::vector<double> linear_times(double t_max, int count);

double rho(double tau);

}  // namespace hbl
