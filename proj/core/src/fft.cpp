#include "hbl/fft.hpp"

#include "hbl/errors.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <vector>

namespace hbl {

namespace {
// Planner calls are not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

struct Fft::Impl {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::size_t total = 0;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (buf) fftw_free(buf);
  }
};

Fft::Fft(int dim, int N, int components) : impl_(std::make_unique<Impl>()), components_(components) {
  if (dim < 1 || dim > 3 || N < 2 || components < 1) throw ValidationError("fft: invalid shape");
  std::vector<int> n(dim, N);
  points_ = 1;
  for (int i = 0; i < dim; ++i) points_ *= N;
  impl_->total = static_cast<std::size_t>(points_) * components;
  std::lock_guard lock(planner_mutex());
  impl_->buf = fftw_alloc_complex(impl_->total);
  if (!impl_->buf) throw Error("fft: allocation failed");
  impl_->fwd = fftw_plan_many_dft(dim, n.data(), components, impl_->buf, nullptr, 1, static_cast<int>(points_),
                                  impl_->buf, nullptr, 1, static_cast<int>(points_), FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_many_dft(dim, n.data(), components, impl_->buf, nullptr, 1, static_cast<int>(points_),
                                  impl_->buf, nullptr, 1, static_cast<int>(points_), FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) throw Error("fft: planning failed");
}

Fft::~Fft() = default;

void Fft::forward(const RField& in, CField& out) {
  const CField c = in.cast<cplx>();
  forward(c, out);
}

void Fft::forward(const CField& in, CField& out) {
  if (in.rows() != components_ || in.cols() != points_) throw ValidationError("fft: field shape mismatch");
  std::memcpy(static_cast<void*>(impl_->buf), in.data(), impl_->total * sizeof(cplx));
  fftw_execute(impl_->fwd);
  out.resize(components_, points_);
  std::memcpy(static_cast<void*>(out.data()), impl_->buf, impl_->total * sizeof(cplx));
}

void Fft::inverse(const CField& in, CField& out) {
  if (in.rows() != components_ || in.cols() != points_) throw ValidationError("fft: field shape mismatch");
  std::memcpy(static_cast<void*>(impl_->buf), in.data(), impl_->total * sizeof(cplx));
  fftw_execute(impl_->inv);
  out.resize(components_, points_);
  std::memcpy(static_cast<void*>(out.data()), impl_->buf, impl_->total * sizeof(cplx));
  out /= static_cast<double>(points_);
}

void Fft::inverse_real(const CField& in, RField& out) {
  CField tmp;
  inverse(in, tmp);
  out = tmp.real();
}

}  // namespace hbl
