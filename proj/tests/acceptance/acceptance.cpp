// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "fixtures.hpp"

#include <hbl/decay.hpp>
#include <hbl/dissipativity.hpp>
#include <hbl/errors.hpp>
#include <hbl/model.hpp>
#include <hbl/sim.hpp>
#include <hbl/spectral.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace hbl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool near_boundary(double x, double at) { return std::abs(x - at) < 0.05 / 2 + 1e-12; }

// 1. Sweep of the Jin-Xin family over b = diag(k1, k2).
Outcome sweep() {
  Outcome o;
  const RadialGrid rg = RadialGrid::make();
  const SphereGrid sg = SphereGrid::make(1);
  int checked = 0, mismatches = 0, nilpotent_d2 = 0, total = 0;
  for (int i = 0; i <= 34; ++i) {
    for (int j = 0; j <= 34; ++j) {
      const double k1 = 0.5 + 0.25 * i, k2 = 0.5 + 0.25 * j;
      ++total;
      const auto nil = check_jinxin(fixtures::kappa_jinxin(k1, k2, fixtures::nilpotent_K()), rg, sg);
      if (nil.d2.verdict == Verdict::holds) ++nilpotent_d2;
      if (near_boundary(k1 + k2, 8.0) || near_boundary(k1, 1.0) || near_boundary(k2, 1.0)) continue;
      const auto r = check_jinxin(fixtures::kappa_jinxin(k1, k2), rg, sg);
      const bool d2 = k1 + k2 > 8.0;
      const bool d3 = k1 == k2 ? k1 > 4.0 : (k1 > 1.0 && k2 > 1.0);
      ++checked;
      const bool ok = (r.d2.verdict == Verdict::holds) == d2 && (r.d3.verdict == Verdict::holds) == d3;
      if (!ok) {
        ++mismatches;
        o.require(false, fmt("mismatch at (%g, %g)", k1, k2));
      }
    }
  }
  o.detail = fmt("%g points checked, %g mismatches", checked, mismatches) + (o.detail.empty() ? "" : "; " + o.detail);
  std::printf("INFO  1 nilpotent coupling: (D2)_2 holds at %d of %d points\n", nilpotent_d2, total);
  return o;
}

// 2. Counterexamples: verdicts plus the certify witness regime.
Outcome counterexamples() {
  Outcome o;
  const RadialGrid rg = RadialGrid::make();
  const SphereGrid sg = SphereGrid::make(1);
  struct Case {
    double k1, k2;
    const char* failing;
    Regime regime;
  };
  for (const Case& c : {Case{1, 8, "D3", Regime::large}, Case{2, 6, "D2", Regime::small}}) {
    const auto jx = fixtures::kappa_jinxin(c.k1, c.k2);
    const auto r = check_jinxin(jx, rg, sg);
    const bool d2_fail = std::string(c.failing) == "D2";
    const std::string tag = fmt("(%g,%g)", c.k1, c.k2);
    o.require(r.d1.verdict == Verdict::holds, tag + " D1 not holds");
    o.require((r.d2.verdict == Verdict::fails) == d2_fail, tag + " D2 verdict");
    o.require((r.d3.verdict == Verdict::fails) == !d2_fail, tag + " D3 verdict");
    const auto cert = certify_decay(SymbolModel::from_system(jinxin_normal_form(jx)), rg, sg, linear_times(50.0, 40));
    o.require(!cert.pass, tag + " certificate passed");
    o.require(cert.witness.regime == c.regime, tag + " witness regime " + std::string(to_string(cert.witness.regime)));
    o.require(cert.witness.eigenvalue.real() >= -1e-6, tag + fmt(" witness Re %.3g", cert.witness.eigenvalue.real()));
  }
  return o;
}

// 3. Decay certificates checked against an independent matrix exponential.
Outcome certificates() {
  Outcome o;
  const RadialGrid rg = RadialGrid::make();
  const SphereGrid sg = SphereGrid::make(1);
  const auto times = linear_times(50.0, 40);
  for (const auto& [name, sys] : std::vector<std::pair<std::string, LinearSystem>>{
           {"telegraph", fixtures::telegraph()}, {"(3,6)", jinxin_normal_form(fixtures::kappa_jinxin(3, 6))}}) {
    const auto cert = certify_decay(SymbolModel::from_system(sys), rg, sg, times);
    o.require(cert.pass && cert.c > 0.0, name + " not certified");
    o.require(cert.envelope.size() == 61u * 2u * 40u, name + " envelope size");
    double worst = 0.0;
    for (const auto& s : cert.envelope) {
      const Vec xi = s.radius * sg.points[static_cast<std::size_t>(s.direction)];
      const CMat E = (sys.dispersion(xi) * s.t).exp();
      const double norm = Eigen::JacobiSVD<CMat>(E).singularValues()(0);
      worst = std::max(worst, norm * std::exp(cert.c * rho(s.radius) * s.t));
    }
    o.require(worst <= cert.C * (1.0 + 1e-9), name + fmt(" ratio %.6g exceeds C %.6g", worst, cert.C));
    std::printf("INFO  3 %s: c = %.4g, C = %.4g, independent max ratio %.4g\n", name.c_str(), cert.c, cert.C, worst);
  }
  return o;
}

// 4. Projected-block expansions against finite differences on random systems.
Outcome expansions() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  const SphereGrid sg = SphereGrid::make(1);
  int tested = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200 && tested < 10; ++trial) {
    const int n = 2 + trial % 5;
    const int m = 1 + trial % (n - 1);
    const auto sys = fixtures::random_symmetric_dissipative(rng, n, m);
    if (check_D2(sys, sg).verdict != Verdict::holds || check_D3(sys, sg).verdict != Verdict::holds) continue;
    try {
      double d = 0.0;
      for (double s : {1.0, -1.0}) {
        const Vec w = Vec::Constant(1, s);
        d = std::max({d, expand_small(sys, w).max_deviation(), expand_large(sys, w).max_deviation()});
      }
      worst = std::max(worst, d);
      ++tested;
    } catch (const CrossingDetected&) {
    }
  }
  o.require(tested == 10, fmt("only %g systems usable", tested));
  o.require(worst <= 1e-3, fmt("max deviation %.3g", worst));
  if (o.pass) o.detail = fmt("max deviation %.3g over %g systems", worst, tested);
  return o;
}

// 5. Semigroup decay slopes.
Outcome slopes() {
  Outcome o;
  const auto ts = geometric_times(1e2, 1e4, 12);
  for (int d = 1; d <= 3; ++d) {
    const double s = semigroup_decay(SymbolModel::scalar(d, false), ts).slope;
    o.require(std::abs(s + d / 4.0) <= 0.05, fmt("scalar d=%g slope %.4g", d, s));
    std::printf("INFO  5 scalar d=%d slope %.4f (expected %.4f)\n", d, s, -d / 4.0);
  }
  const double s = semigroup_decay(SymbolModel::from_system(fixtures::telegraph()), ts).slope;
  o.require(std::abs(s + 0.25) <= 0.07, fmt("telegraph slope %.4g", s));
  std::printf("INFO  5 telegraph slope %.4f (expected -0.25)\n", s);
  return o;
}

// 6. Common block symmetrizer for 2-D scalar Jin-Xin systems.
Outcome symmetrizers() {
  Outcome o;
  const auto with = jinxin_normal_form(fixtures::jinxin_2d_scalar(1, 0, 2, 2));
  o.require(common_block_symmetrizer(with.flux(), 1, 2).status == BlockSymmetrizerResult::Status::none,
            "K1=1 admits a symmetrizer");
  const auto without = jinxin_normal_form(fixtures::jinxin_2d_scalar(0, 0, 2, 2));
  const auto r = common_block_symmetrizer(without.flux(), 1, 2);
  if (r.status != BlockSymmetrizerResult::Status::found || !r.S) {
    o.require(false, "K=0 has no symmetrizer");
    return o;
  }
  const Mat& S = *r.S;
  for (const auto& A : without.flux()) {
    const Mat SA = S * A;
    o.require((SA - SA.transpose()).cwiseAbs().maxCoeff() <= 1e-10, "S A^j not symmetric");
  }
  o.require((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "S not symmetric");
  o.require(Eigen::SelfAdjointEigenSolver<Mat>(S).eigenvalues().minCoeff() > 0.0, "S not positive definite");
  return o;
}

// 7. Nonlinear Jin-Xin run with Burgers-type flux.
Outcome nonlinear() {
  Outcome o;
  const auto jx = fixtures::burgers_jinxin(0.5, 2.0);
  const auto g = PeriodicGrid::make(1, 256, 100.0);
  SimOptions opt;
  opt.output_times = {1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
  auto run = [&](double amplitude) {
    Vec amp(2);
    amp << 0.0, amplitude;
    return simulate_jinxin(jx, g, gaussian_data(g, amp, 2.0), 50.0, 1.0 / 16.0, opt);
  };
  const auto full = run(1e-3), half = run(5e-4);
  if (full.aborted || half.aborted || full.l2.size() != opt.output_times.size() ||
      half.l2.size() != full.l2.size()) {
    o.require(false, "run aborted or missing outputs");
    return o;
  }
  auto at = [&](const SimResult& r, double t) {
    for (std::size_t i = 0; i < r.times.size(); ++i)
      if (std::abs(r.times[i] - t) < 1e-9) return r.l2[i];
    return std::nan("");
  };
  const double ratio = at(full, 50.0) / at(full, 1.0);
  o.require(ratio < 0.1, fmt("L2 ratio %.4g", ratio));
  double lin = 0.0;
  for (std::size_t i = 0; i < full.l2.size(); ++i) lin = std::max(lin, std::abs(half.l2[i] / full.l2[i] - 0.5) / 0.5);
  o.require(lin <= 0.02, fmt("linear scaling deviation %.3g", lin));
  if (o.pass) o.detail = fmt("L2(50)/L2(1) = %.4g, scaling deviation %.3g", ratio, lin);
  return o;
}

struct Verdicts {
  Verdict H, RH, K, D1, D2, D3;
  bool operator==(const Verdicts&) const = default;
};

Verdicts all_checks(const LinearSystem& sys, const RadialGrid& rg, const SphereGrid& sg) {
  return {check_H(sys, sg).verdict,      check_RH(sys).verdict,      check_K(sys, sg).verdict,
          check_D1(sys, rg, sg).verdict, check_D2(sys, sg).verdict, check_D3(sys, sg).verdict};
}

// 8. Invariants.
Outcome invariants() {
  Outcome o;
  std::mt19937_64 rng(77);

  double proj = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    const CMat M = fixtures::random_matrix(rng, n, n).cast<cplx>();
    const auto groups = eig_grouped(M);
    CMat sum = CMat::Zero(n, n);
    for (std::size_t a = 0; a < groups.size(); ++a) {
      const CMat Pa = groups[a].projector();
      sum += Pa;
      for (std::size_t b = 0; b < groups.size(); ++b) {
        const CMat PP = Pa * groups[b].projector();
        proj = std::max(proj, (a == b ? (PP - Pa) : PP).cwiseAbs().maxCoeff());
      }
    }
    proj = std::max(proj, (sum - CMat::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  o.require(proj <= 1e-8, fmt("projector identity error %.3g", proj));

  double lyap = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    const Mat G = fixtures::random_matrix(rng, n, n);
    const CMat M = (G - (Eigen::EigenSolver<Mat>(G).eigenvalues().real().maxCoeff() + 0.5) * Mat::Identity(n, n)).cast<cplx>();
    lyap = std::max(lyap, lyapunov_symmetrizer(M).residual);
  }
  o.require(lyap <= 1e-8, fmt("Lyapunov residual %.3g", lyap));

  const RadialGrid rg = RadialGrid::make(1e-3, 1e3, 31);
  const SphereGrid sg = SphereGrid::make(1);
  std::vector<LinearSystem> systems{fixtures::telegraph(), jinxin_normal_form(fixtures::kappa_jinxin(3, 6)),
                                    jinxin_normal_form(fixtures::kappa_jinxin(1, 8)),
                                    jinxin_normal_form(fixtures::kappa_jinxin(2, 6))};
  int changed = 0;
  for (const auto& sys : systems) {
    const Verdicts base = all_checks(sys, rg, sg);
    for (int trial = 0; trial < 20; ++trial) {
      Mat T = Mat::Zero(sys.n(), sys.n());
      T.topLeftCorner(sys.m(), sys.m()) = fixtures::random_matrix(rng, sys.m(), sys.m(), 0.4) + Mat::Identity(sys.m(), sys.m());
      T.bottomRightCorner(sys.r(), sys.r()) = fixtures::random_matrix(rng, sys.r(), sys.r(), 0.4) + Mat::Identity(sys.r(), sys.r());
      const Mat Ti = T.inverse();
      std::vector<Mat> A;
      for (const auto& a : sys.flux()) A.push_back(Ti * a * T);
      Mat L = Ti * sys.source() * T;
      L.topRows(sys.m()).setZero();
      if (!(all_checks(LinearSystem(A, L, sys.m()), rg, sg) == base)) ++changed;
    }
  }
  o.require(changed == 0, fmt("%g conjugations changed a verdict", changed));

  auto jx = fixtures::burgers_jinxin(0.5, 2.0);
  std::vector<std::vector<Monomial>> terms(1);
  terms[0].push_back({0.5, {1}});
  jx.flux_poly = std::vector<PolyMap>{PolyMap(1, terms)};
  const auto g = PeriodicGrid::make(1, 128, 20.0);
  const RField U0 = gaussian_data(g, Vec::Constant(2, 1.0), 1.5);
  const RField exact = simulate_linear(linearize(build_jinxin(jx)), g, U0, 1.0, 1).final_state;
  SimOptions opt;
  opt.dealias = false;
  std::vector<double> err;
  for (double dt : {0.05, 0.025, 0.0125}) err.push_back((simulate_jinxin(jx, g, U0, 1.0, dt, opt).final_state - exact).cwiseAbs().maxCoeff());
  const double order = std::min(std::log2(err[0] / err[1]), std::log2(err[1] / err[2]));
  o.require(order >= 1.9, fmt("splitting order %.3g", order));

  const auto bj = fixtures::burgers_jinxin(0.5, 2.0);
  const auto g2 = PeriodicGrid::make(1, 128, 40.0);
  const RField V0 = noise_data(g2, Vec::Constant(2, 0.05), 21);
  const double drift_nl = std::abs(simulate_jinxin(bj, g2, V0, 5.0, jinxin_default_dt(bj, g2)).final_state.row(0).mean() -
                                   V0.row(0).mean());
  const RField W0 = noise_data(g2, Vec::Constant(2, 1.0), 4);
  const double drift_lin =
      std::abs(simulate_linear(fixtures::telegraph(), g2, W0, 25.0, 50).final_state.row(0).mean() - W0.row(0).mean());
  o.require(std::max(drift_nl, drift_lin) <= 1e-12, fmt("zero-mode drift %.3g", std::max(drift_nl, drift_lin)));

  if (o.pass)
    o.detail = fmt("projector %.2g, Lyapunov %.2g, splitting order %.3g", proj, lyap, order);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Jin-Xin sweep thresholds", sweep},
      {"counterexamples (1,8) and (2,6)", counterexamples},
      {"decay certificates", certificates},
      {"asymptotic expansions", expansions},
      {"semigroup decay slopes", slopes},
      {"block symmetrizer obstruction", symmetrizers},
      {"nonlinear Jin-Xin decay", nonlinear},
      {"invariants", invariants},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s  %zu %s%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
