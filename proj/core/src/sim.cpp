#include "hbl/sim.hpp"

#include "hbl/errors.hpp"
#include "hbl/expm.hpp"
#include "hbl/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <set>

namespace hbl {

PeriodicGrid PeriodicGrid::make(int dim, int N, double L) {
  if (dim < 1 || dim > 3) throw ValidationError("periodic grid: dimension must be 1, 2 or 3");
  const int lo = dim == 3 ? 16 : 32;
  const int hi = dim == 1 ? 1024 : dim == 2 ? 256 : 64;
  if (N < lo || N > hi || (N & (N - 1)) != 0)
    throw ValidationError("periodic grid: N must be a power of two in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] for d = " + std::to_string(dim));
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("periodic grid: box length must be positive");
  PeriodicGrid g;
  g.dim = dim;
  g.N = N;
  g.L = L;
  return g;
}

long PeriodicGrid::points() const {
  long p = 1;
  for (int i = 0; i < dim; ++i) p *= N;
  return p;
}

double PeriodicGrid::cell_volume() const { return std::pow(dx(), dim); }

std::vector<int> PeriodicGrid::multi_index(long flat) const {
  std::vector<int> idx(dim);
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % N);
    flat /= N;
  }
  return idx;
}

Vec PeriodicGrid::xi(long flat) const {
  const auto idx = multi_index(flat);
  Vec k(dim);
  for (int a = 0; a < dim; ++a) k[a] = 2.0 * M_PI * wavenumber(idx[a]) / L;
  return k;
}

Vec PeriodicGrid::x(long flat) const {
  const auto idx = multi_index(flat);
  Vec p(dim);
  for (int a = 0; a < dim; ++a) p[a] = idx[a] * dx();
  return p;
}

bool PeriodicGrid::nyquist(long flat) const {
  for (int i : multi_index(flat))
    if (i == N / 2) return true;
  return false;
}

bool PeriodicGrid::aliased(long flat) const {
  for (int i : multi_index(flat))
    if (3 * std::abs(wavenumber(i)) > N) return true;
  return false;
}

namespace {

void zero_nyquist(const PeriodicGrid& g, CField& F) {
  for (long k = 0; k < g.points(); ++k)
    if (g.nyquist(k)) F.col(k).setZero();
}

std::vector<CMat> mode_propagators(const PeriodicGrid& g, const std::function<CMat(const Vec&)>& gen) {
  std::vector<CMat> E(g.points());
  parallel_for(E.size(), [&](std::size_t k) { E[k] = expm(gen(g.xi(static_cast<long>(k)))); });
  return E;
}

void apply(const std::vector<CMat>& E, CField& U) {
  const long P = U.cols();
  parallel_for(static_cast<std::size_t>(P), [&](std::size_t k) { U.col(k) = E[k] * U.col(k); });
}

class Recorder {
 public:
  Recorder(const PeriodicGrid& g, int n, const SimOptions& opt, SimResult& res) : g_(g), fft_(g.dim, g.N, n), opt_(opt), res_(res) {
    for (double s : opt.sobolev) res_.sobolev[s];
    res_.tracked_modes = opt.track_modes;
    weights_.resize(opt.sobolev.size());
    for (std::size_t q = 0; q < opt.sobolev.size(); ++q) {
      weights_[q].resize(g.points());
      for (long k = 0; k < g.points(); ++k) weights_[q][k] = std::pow(1.0 + g.xi(k).squaredNorm(), opt.sobolev[q]);
    }
  }

  void operator()(double t, const CField& Uhat) {
    const double scale = g_.cell_volume() / static_cast<double>(g_.points());
    const Eigen::RowVectorXd power = Uhat.cwiseAbs2().colwise().sum();
    res_.times.push_back(t);
    res_.l2.push_back(std::sqrt(scale * power.sum()));
    RField U;
    fft_.inverse_real(Uhat, U);
    res_.linf.push_back(U.cwiseAbs().maxCoeff());
    for (std::size_t q = 0; q < opt_.sobolev.size(); ++q) {
      double acc = 0.0;
      for (long k = 0; k < g_.points(); ++k) acc += weights_[q][k] * power[k];
      res_.sobolev[opt_.sobolev[q]].push_back(std::sqrt(scale * acc));
    }
    for (long m : opt_.track_modes) res_.modes.push_back({t, m, Uhat.col(m)});
  }

  RField physical(const CField& Uhat) {
    RField U;
    fft_.inverse_real(Uhat, U);
    return U;
  }

 private:
  const PeriodicGrid& g_;
  Fft fft_;
  const SimOptions& opt_;
  SimResult& res_;
  std::vector<std::vector<double>> weights_;
};

std::set<long> output_steps(const std::vector<double>& times, double dt, long steps) {
  std::set<long> out;
  if (times.empty()) {
    for (long k = 0; k <= steps; ++k) out.insert(k);
    return out;
  }
  for (double t : times) out.insert(std::clamp<long>(std::lround(t / dt), 0, steps));
  return out;
}

void check_field(const PeriodicGrid& g, const RField& U0, int n) {
  if (U0.rows() != n || U0.cols() != g.points())
    throw ValidationError("initial data must be " + std::to_string(n) + " x " + std::to_string(g.points()));
  if (!U0.allFinite()) throw ValidationError("initial data contains NaN or Inf");
}

}  // namespace

SimResult simulate_linear(const LinearSystem& sys, const PeriodicGrid& grid, const RField& U0, double T, long n_steps,
                          const SimOptions& opt) {
  if (sys.dim() != grid.dim) throw ValidationError("system and grid dimensions differ");
  if (n_steps < 1 || !(T > 0.0)) throw ValidationError("simulate_linear needs T > 0 and n_steps >= 1");
  const int n = sys.n();
  check_field(grid, U0, n);
  SimResult res;
  res.dt = T / static_cast<double>(n_steps);
  res.steps = n_steps;
  res.dealias = false;

  Fft fft(grid.dim, grid.N, n);
  CField Uhat;
  fft.forward(U0, Uhat);
  zero_nyquist(grid, Uhat);
  const double dt = res.dt;
  const auto E = mode_propagators(grid, [&](const Vec& xi) { return (sys.dispersion(xi) * dt).eval(); });

  Recorder rec(grid, n, opt, res);
  const auto outs = output_steps(opt.output_times, dt, n_steps);
  if (outs.count(0)) rec(0.0, Uhat);
  for (long s = 1; s <= n_steps; ++s) {
    apply(E, Uhat);
    if (outs.count(s)) rec(s * dt, Uhat);
  }
  res.final_state = rec.physical(Uhat);
  res.final_time = T;
  return res;
}

double jinxin_cfl_limit(const JinXinSpec& jx, const PeriodicGrid& grid) {
  double speed = 0.0;
  for (const auto& b : jx.b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(b, Eigen::EigenvaluesOnly);
    speed = std::max(speed, std::sqrt(es.eigenvalues().maxCoeff()));
  }
  return 0.5 * grid.dx() / speed;
}

double jinxin_default_dt(const JinXinSpec& jx, const PeriodicGrid& grid) { return 0.5 * jinxin_cfl_limit(jx, grid); }

SimResult simulate_jinxin(const JinXinSpec& jx, const PeriodicGrid& grid, const RField& U0, double T, double dt,
                          const SimOptions& opt) {
  jx.validate();
  if (!jx.flux_poly) throw ValidationError("simulate_jinxin requires a polynomial flux");
  if (jx.dim != grid.dim) throw ValidationError("system and grid dimensions differ");
  if (!(T > 0.0) || !(dt > 0.0)) throw ValidationError("simulate_jinxin needs T > 0 and dt > 0");
  const double limit = jinxin_cfl_limit(jx, grid);
  if (dt > limit * (1.0 + 1e-12))
    throw CflViolation("CFL violation: dt = " + std::to_string(dt) + " exceeds 0.5 dx / max sqrt(lambda_max(b)) = " +
                       std::to_string(limit));
  const int m = jx.m, d = jx.dim, n = jx.n();
  check_field(grid, U0, n);
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(T / dt - 1e-9)));
  dt = T / static_cast<double>(steps);

  SimResult res;
  res.dt = dt;
  res.steps = steps;
  res.dealias = opt.dealias;

  const BalanceLawSpec spec = build_jinxin(jx);
  const LinearSystem transport(spec.flux_jacobians, Mat::Zero(n, n), m);
  const auto Ehalf = mode_propagators(grid, [&](const Vec& xi) {
    return (-kI * transport.symbol(xi).cast<cplx>() * (0.5 * dt)).eval();
  });
  const double decay = std::exp(-dt / jx.eps);
  const auto& F = *jx.flux_poly;

  Fft fft_all(d, grid.N, n), fft_u(d, grid.N, m), fft_f(d, grid.N, m * d);
  CField Uhat, uhat, Fhat;
  fft_all.forward(U0, Uhat);
  zero_nyquist(grid, Uhat);
  const long P = grid.points();
  std::vector<long> aliased;
  for (long k = 0; k < P; ++k)
    if (grid.aliased(k) || grid.nyquist(k)) aliased.push_back(k);

  Recorder rec(grid, n, opt, res);
  const auto outs = output_steps(opt.output_times, dt, steps);
  if (outs.count(0)) rec(0.0, Uhat);

  RField u, Fx(m * d, P);
  CField last = Uhat;
  for (long s = 1; s <= steps; ++s) {
    apply(Ehalf, Uhat);
    uhat = Uhat.topRows(m);
    fft_u.inverse_real(uhat, u);
    parallel_for(static_cast<std::size_t>(P), [&](std::size_t x) {
      Vec ux = u.col(x);
      Vec fx(m);
      for (int j = 0; j < d; ++j) {
        F[j].eval_into(std::span<const double>(ux.data(), m), std::span<double>(fx.data(), m));
        Fx.block(j * m, x, m, 1) = fx;
      }
    });
    fft_f.forward(Fx, Fhat);
    if (opt.dealias) {
      for (long k : aliased) Fhat.col(k).setZero();
    } else {
      for (long k = 0; k < P; ++k)
        if (grid.nyquist(k)) Fhat.col(k).setZero();
    }
    Uhat.bottomRows(m * d) = Fhat + (Uhat.bottomRows(m * d) - Fhat) * decay;
    apply(Ehalf, Uhat);
    if (!Uhat.allFinite()) {
      res.aborted = true;
      res.note = "non-finite state at t = " + std::to_string(s * dt) + "; returning the last valid state";
      res.final_state = rec.physical(last);
      res.final_time = (s - 1) * dt;
      return res;
    }
    last = Uhat;
    if (outs.count(s)) rec(s * dt, Uhat);
  }
  res.final_state = rec.physical(Uhat);
  res.final_time = T;
  return res;
}

DecayFit fit_series(const std::string& name, const std::vector<double>& t, const std::vector<double>& y, double t0,
                    double t1) {
  DecayFit fit;
  fit.norm = name;
  std::vector<double> tt, ly;
  bool truncated = false;
  for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    if (!(y[i] > 1e-300)) {
      truncated = true;
      break;
    }
    tt.push_back(t[i]);
    ly.push_back(std::log(y[i]));
  }
  if (truncated) fit.notes.push_back("window truncated at the first norm below 1e-300");
  fit.samples = static_cast<int>(tt.size());
  if (tt.size() < 2) {
    fit.notes.push_back("fewer than two samples in the window");
    fit.power_slope = fit.exp_rate = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const auto n = static_cast<Eigen::Index>(tt.size());
  Vec yv = Eigen::Map<const Vec>(ly.data(), n);
  auto solve = [&](auto xfun, double& slope, double& resid) {
    Mat A(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      A(i, 0) = 1.0;
      A(i, 1) = xfun(tt[i]);
    }
    const Vec c = A.colPivHouseholderQr().solve(yv);
    slope = c[1];
    resid = (A * c - yv).norm() / std::sqrt(double(n));
  };
  solve([](double s) { return std::log1p(s); }, fit.power_slope, fit.power_residual);
  double s = 0.0;
  solve([](double s) { return s; }, s, fit.exp_residual);
  fit.exp_rate = -s;
  if (fit.power_residual > 10.0 * fit.exp_residual && fit.power_residual > 1e-3)
    fit.notes.push_back("power-law fit poor; exponential regime");
  else if (fit.exp_residual > 10.0 * fit.power_residual && fit.exp_residual > 1e-3)
    fit.notes.push_back("exponential fit poor; algebraic regime");
  return fit;
}

std::vector<DecayFit> measure_decay(const SimResult& res, double t0, double t1) {
  if (res.times.empty() || t0 > res.times.back() || t1 < res.times.front() || t0 >= t1)
    throw ValidationError("decay window outside the simulated span");
  std::vector<DecayFit> out;
  out.push_back(fit_series("L2", res.times, res.l2, t0, t1));
  out.push_back(fit_series("Linf", res.times, res.linf, t0, t1));
  for (const auto& [s, v] : res.sobolev) {
    char name[32];
    std::snprintf(name, sizeof name, "H%g", s);
    out.push_back(fit_series(name, res.times, v, t0, t1));
  }
  return out;
}

double field_l2(const PeriodicGrid& grid, const RField& U) { return std::sqrt(grid.cell_volume() * U.squaredNorm()); }

double field_linf(const RField& U) { return U.size() ? U.cwiseAbs().maxCoeff() : 0.0; }

RField gaussian_data(const PeriodicGrid& grid, const Vec& amplitudes, double width, std::optional<Vec> center) {
  if (!(width > 0.0)) throw ValidationError("gaussian width must be positive");
  const Vec c = center ? *center : Vec::Constant(grid.dim, 0.5 * grid.L);
  if (c.size() != grid.dim) throw ValidationError("gaussian center has the wrong dimension");
  RField U(amplitudes.size(), grid.points());
  for (long k = 0; k < grid.points(); ++k) {
    Vec r = grid.x(k) - c;
    for (int a = 0; a < grid.dim; ++a) r[a] -= grid.L * std::round(r[a] / grid.L);
    const double g = std::exp(-r.squaredNorm() / (2.0 * width * width));
    U.col(k) = amplitudes * g;
  }
  return U;
}

RField noise_data(const PeriodicGrid& grid, const Vec& amplitudes, std::uint64_t seed, int kmax) {
  const int n = static_cast<int>(amplitudes.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CField hat = CField::Zero(n, grid.points());
  for (long k = 0; k < grid.points(); ++k) {
    bool inside = !grid.nyquist(k);
    for (int i : grid.multi_index(k)) inside = inside && std::abs(grid.wavenumber(i)) <= kmax;
    for (int c = 0; c < n; ++c) {
      const cplx z(nd(rng), nd(rng));  // drawn for every mode so the stream is layout independent
      if (inside) hat(c, k) = z;
    }
  }
  Fft fft(grid.dim, grid.N, n);
  RField U;
  fft.inverse_real(hat, U);
  for (int c = 0; c < n; ++c) {
    const double peak = U.row(c).cwiseAbs().maxCoeff();
    U.row(c) *= peak > 0.0 ? amplitudes[c] / peak : 0.0;
  }
  return U;
}

RField mode_data(const PeriodicGrid& grid, const Vec& amplitudes, const std::vector<int>& k) {
  if (static_cast<int>(k.size()) != grid.dim) throw ValidationError("mode index has the wrong dimension");
  RField U(amplitudes.size(), grid.points());
  for (long p = 0; p < grid.points(); ++p) {
    const auto idx = grid.multi_index(p);
    double phase = 0.0;
    for (int a = 0; a < grid.dim; ++a) phase += 2.0 * M_PI * k[a] * idx[a] / grid.N;
    U.col(p) = amplitudes * std::cos(phase);
  }
  return U;
}

namespace {

template <class T>
void put_le(std::ofstream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::ifstream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw ValidationError("snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const PeriodicGrid& grid, const RField& U, double t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open snapshot file " + path);
  os.write("HBL1", 4);
  put_le<std::uint32_t>(os, grid.dim);
  put_le<std::uint32_t>(os, grid.N);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(U.rows()));
  put_le<std::uint32_t>(os, 8);
  put_le<double>(os, grid.L);
  put_le<double>(os, t);
  for (Eigen::Index c = 0; c < U.rows(); ++c)
    for (Eigen::Index k = 0; k < U.cols(); ++k) put_le<double>(os, U(c, k));
  if (!os) throw Error("failed writing snapshot " + path);
}

RField read_snapshot(const std::string& path, PeriodicGrid& grid, double& t) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open snapshot file " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "HBL1", 4) != 0) throw ValidationError("not an HBL1 snapshot");
  const auto dim = get_le<std::uint32_t>(is);
  const auto N = get_le<std::uint32_t>(is);
  const auto comps = get_le<std::uint32_t>(is);
  if (get_le<std::uint32_t>(is) != 8) throw ValidationError("snapshot dtype is not f64");
  const double L = get_le<double>(is);
  t = get_le<double>(is);
  grid = PeriodicGrid::make(static_cast<int>(dim), static_cast<int>(N), L);
  RField U(comps, grid.points());
  for (Eigen::Index c = 0; c < U.rows(); ++c)
    for (Eigen::Index k = 0; k < U.cols(); ++k) U(c, k) = get_le<double>(is);
  return U;
}

}  // namespace hbl
