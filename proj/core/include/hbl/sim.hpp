#pragma once

#include "hbl/fft.hpp"
#include "hbl/model.hpp"
#include "hbl/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hbl {

struct PeriodicGrid {
  int dim = 1;
  int N = 64;  // points per axis
  double L = 2.0 * M_PI;

  // Validates N (power of two in the per-dimension range) and L > 0.
  static PeriodicGrid make(int dim, int N, double L);

  long points() const;
  double dx() const { return L / N; }
  double cell_volume() const;
  // Integer wavenumber along one axis for FFT index i (i < N/2 -> i, else i - N).
  int wavenumber(int i) const { return i < N / 2 ? i : i - N; }
  std::vector<int> multi_index(long flat) const;
  Vec xi(long flat) const;  // 2π k / L
  Vec x(long flat) const;   // physical coordinates in [0, L)^d
  bool nyquist(long flat) const;
  // Outside the 2/3 band on some axis.
  bool aliased(long flat) const;
};

struct ModeSnapshot {
  double t;
  long mode;
  CVec value;
};

struct SimResult {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> linf;
  std::map<double, std::vector<double>> sobolev;  // s -> ||Λ^s U||
  std::vector<ModeSnapshot> modes;
  std::vector<long> tracked_modes;
  double dt = 0.0;
  long steps = 0;
  bool dealias = false;
  bool aborted = false;
  std::string note;
  RField final_state;
  double final_time = 0.0;
};

struct SimOptions {
  std::vector<double> sobolev;  // requested s values
  std::vector<long> track_modes;
  std::vector<double> output_times;  // empty: every step (jinxin) / every output step (linear)
  bool dealias = true;
};

// Exact per-mode propagation with a cached exp(M(ξ_k) T/n_steps); outputs at k T / n_steps.
SimResult simulate_linear(const LinearSystem& sys, const PeriodicGrid& grid, const RField& U0, double T, long n_steps,
                          const SimOptions& opt = {});

// Largest admissible time step 0.5 dx / max_j sqrt(lambda_max(b^j)).
double jinxin_cfl_limit(const JinXinSpec& jx, const PeriodicGrid& grid);
double jinxin_default_dt(const JinXinSpec& jx, const PeriodicGrid& grid);

// Strang splitting for the nonlinear Jin-Xin system; state layout (u, v^1, ..., v^d).
// Throws CflViolation if dt exceeds the limit. dt is shortened so that T is hit exactly.
SimResult simulate_jinxin(const JinXinSpec& jx, const PeriodicGrid& grid, const RField& U0, double T, double dt,
                          const SimOptions& opt = {});

struct DecayFit {
  std::string norm;
  double power_slope = 0.0;  // d log(norm) / d log(1+t)
  double power_residual = 0.0;
  double exp_rate = 0.0;  // -d log(norm) / dt
  double exp_residual = 0.0;
  int samples = 0;
  std::vector<std::string> notes;
};

std::vector<DecayFit> measure_decay(const SimResult& res, double t0, double t1);
DecayFit fit_series(const std::string& name, const std::vector<double>& t, const std::vector<double>& y, double t0,
                    double t1);

// Norms of a real field.
double field_l2(const PeriodicGrid& grid, const RField& U);
double field_linf(const RField& U);

// Initial data.
RField gaussian_data(const PeriodicGrid& grid, const Vec& amplitudes, double width, std::optional<Vec> center = {});
RField noise_data(const PeriodicGrid& grid, const Vec& amplitudes, std::uint64_t seed, int kmax = 8);
RField mode_data(const PeriodicGrid& grid, const Vec& amplitudes, const std::vector<int>& k);

// Binary snapshot: "HBL1", u32 dim, u32 N, u32 components, u32 dtype (8 = f64), f64 L, f64 t,
// then components x points doubles, little-endian.
void write_snapshot(const std::string& path, const PeriodicGrid& grid, const RField& U, double t);
RField read_snapshot(const std::string& path, PeriodicGrid& grid, double& t);

}  // namespace hbl
