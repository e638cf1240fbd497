#pragma once

#include "hbl/types.hpp"

#include <complex>
#include <memory>

namespace hbl {

using RField = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CField = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Batched d-dimensional complex FFT over the rows of a components x points
// field. Forward is unnormalized; inverse divides by the point count.
class Fft {
 public:
  Fft(int dim, int N, int components);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int components() const { return components_; }
  long points() const { return points_; }

  void forward(const RField& in, CField& out);
  void forward(const CField& in, CField& out);
  void inverse(const CField& in, CField& out);
  // Real part of the inverse transform.
  void inverse_real(const CField& in, RField& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int components_;
  long points_;
};

}  // namespace hbl
