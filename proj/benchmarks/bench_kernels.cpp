#include <hbl/decay.hpp>
#include <hbl/dissipativity.hpp>
#include <hbl/expm.hpp>
#include <hbl/model.hpp>
#include <hbl/sim.hpp>
#include <hbl/spectral.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace hbl;

namespace {

CMat random_cmat(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = cplx(nd(rng), nd(rng));
  return M;
}

JinXinSpec kappa(double k1, double k2) {
  JinXinSpec jx;
  jx.m = 2;
  Mat b(2, 2), K(2, 2);
  b << k1, 0, 0, k2;
  K << 1, -1, -1, 1;
  jx.b = {b};
  jx.flux_jac = {K};
  return jx;
}

}  // namespace

static void BM_expm(benchmark::State& state) {
  const CMat M = random_cmat(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(expm(M));
}
BENCHMARK(BM_expm)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_eig_grouped(benchmark::State& state) {
  const CMat M = random_cmat(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(eig_grouped(M));
}
BENCHMARK(BM_eig_grouped)->Arg(4)->Arg(8)->Arg(16);

static void BM_lyapunov(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CMat M = random_cmat(n, 3) - 6.0 * CMat::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_symmetrizer(M));
}
BENCHMARK(BM_lyapunov)->Arg(4)->Arg(8)->Arg(16);

static void BM_check_D1(benchmark::State& state) {
  const auto sys = jinxin_normal_form(kappa(3, 6));
  const RadialGrid rg = RadialGrid::make();
  const SphereGrid sg = SphereGrid::make(1);
  for (auto _ : state) benchmark::DoNotOptimize(check_D1(sys, rg, sg));
}
BENCHMARK(BM_check_D1);

static void BM_jinxin_step(benchmark::State& state) {
  JinXinSpec jx;
  jx.b = {Mat::Constant(1, 1, 2.0)};
  jx.flux_jac = {Mat::Constant(1, 1, 0.5)};
  std::vector<std::vector<Monomial>> terms(1);
  terms[0].push_back({0.5, {1}});
  terms[0].push_back({0.5, {2}});
  jx.flux_poly = std::vector<PolyMap>{PolyMap(1, terms)};
  const auto g = PeriodicGrid::make(1, static_cast<int>(state.range(0)), 100.0);
  const RField U0 = noise_data(g, Vec::Constant(2, 1e-3), 1);
  const double dt = jinxin_default_dt(jx, g);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_jinxin(jx, g, U0, dt, dt));
}
BENCHMARK(BM_jinxin_step)->Arg(256)->Arg(1024);
BENCHMARK_MAIN();
