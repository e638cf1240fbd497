#include "hbl/decay.hpp"

#include "hbl/errors.hpp"
#include "hbl/expm.hpp"
#include "hbl/parallel.hpp"
#include "hbl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail/asymptotics.hpp"
#include "detail/report_util.hpp"

namespace hbl {

using namespace detail;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CMat hermitian_part(const CMat& X) { return 0.5 * (X + X.adjoint()); }

Symmetrizer finish(const Vec& xi, CMat D, Regime regime, const CMat& M) {
  D = hermitian_part(D);
  Eigen::SelfAdjointEigenSolver<CMat> es(D, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0)) throw Error("symmetrizer construction produced a non-positive matrix");
  D /= top;
  Symmetrizer s;
  s.xi = xi;
  s.D = D;
  s.regime = regime;
  s.lambda_max = 1.0;
  s.lambda_min = es.eigenvalues().minCoeff() / top;
  Eigen::SelfAdjointEigenSolver<CMat> rs(hermitian_part(-D * M), Eigen::EigenvaluesOnly);
  s.certified_c = rs.eigenvalues().minCoeff() / rho(xi.norm());
  return s;
}

Vec unit(const Vec& v) { return v / v.norm(); }

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::small:
      return "small";
    case Regime::mid:
      return "mid";
    case Regime::large:
      return "large";
  }
  return "mid";
}

double symmetrizer_defect(const Symmetrizer& s, const CMat& M) {
  const auto n = M.rows();
  const CMat X = hermitian_part(s.D * M) + s.certified_c * rho(s.xi.norm()) * CMat::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<CMat> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Symmetrizer symmetrizer_mid(const LinearSystem& sys, const Vec& xi) {
  const CMat M = sys.dispersion(xi);
  LyapunovResult ly;
  try {
    ly = lyapunov_symmetrizer(M);
  } catch (const NotHurwitz& e) {
    throw NotHurwitz("(D1) violated at |xi| = " + std::to_string(xi.norm()) + ": " + e.what(), e.eigenvalue());
  }
  return finish(xi, ly.D, Regime::mid, M);
}

Symmetrizer symmetrizer_small(const LinearSystem& sys, double kappa, const Vec& omega) {
  if (!(kappa > 0.0)) throw ValidationError("symmetrizer_small needs kappa > 0");
  const Vec w = unit(omega);
  const int m = sys.m(), n = sys.n();

  const ConditionReport rh = check_RH(sys);
  if (rh.verdict != Verdict::holds)
    throw ConditionViolation("(RH) fails: q_v is not stable", "RH", w, rh.witnesses.front().eigenvalue);
  const LinearSystem nf = sys.in_normal_form(1e-12) ? sys : normal_form(sys);
  SphereGrid one;
  one.dim = sys.dim();
  one.points = {w};
  const ConditionReport d2 = check_D2(nf, one);
  if (d2.verdict == Verdict::fails)
    throw ConditionViolation("(D2) fails at omega = " + fmt_point(w), "D2", w, d2.witnesses.front().eigenvalue);

  const Vec xi = kappa * w;
  const CMat M = sys.dispersion(xi);
  const double tol = default_cluster_tol(M);
  std::vector<EigenGroup> groups;
  try {
    groups = eig_grouped(M);
  } catch (const NotSemisimple& e) {
    throw RegimeBoundary("small regime: eigenvalue collision at kappa = " + std::to_string(kappa) + "; use the mid regime");
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const EigenGroup& a, const EigenGroup& b) { return std::abs(a.value) < std::abs(b.value); });
  std::vector<const EigenGroup*> slow, fast;
  int count = 0;
  for (const auto& g : groups) {
    if (count < m) {
      slow.push_back(&g);
      count += g.multiplicity;
    } else {
      fast.push_back(&g);
    }
  }
  if (count != m || fast.empty())
    throw RegimeBoundary("small regime: slow cluster does not have size m at kappa = " + std::to_string(kappa) +
                         "; use the mid regime");
  double gap = std::numeric_limits<double>::infinity();
  for (auto* s : slow)
    for (auto* f : fast) gap = std::min(gap, std::abs(s->value - f->value));
  if (gap < 10.0 * tol)
    throw RegimeBoundary("small regime: spectral gap " + std::to_string(gap) + " below 10x cluster tolerance at kappa = " +
                         std::to_string(kappa) + "; use the mid regime");

  CMat Xs(n, m), Xf(n, n - m);
  Eigen::Index c = 0;
  for (auto* s : slow) {
    Xs.middleCols(c, s->multiplicity) = s->right;
    c += s->multiplicity;
  }
  c = 0;
  for (auto* f : fast) {
    Xf.middleCols(c, f->multiplicity) = f->right;
    c += f->multiplicity;
  }
  Xs = Eigen::HouseholderQR<CMat>(Xs).householderQ() * CMat::Identity(n, m);
  Xf = Eigen::HouseholderQR<CMat>(Xf).householderQ() * CMat::Identity(n, n - m);
  CMat X(n, n);
  X << Xs, Xf;
  const CMat R = X.partialPivLu().inverse();
  const CMat B = R * M * X;
  const CMat Mss = B.topLeftCorner(m, m);
  const CMat Mff = B.bottomRightCorner(n - m, n - m);

  LyapunovResult l1, l2;
  try {
    l1 = lyapunov_symmetrizer(Mss / kappa);
    l2 = lyapunov_symmetrizer(Mff);
  } catch (const NotHurwitz& e) {
    throw ConditionViolation(std::string("small regime block not Hurwitz: ") + e.what(), "D2", w, e.eigenvalue());
  }
  CMat Dblk = CMat::Zero(n, n);
  Dblk.topLeftCorner(m, m) = l1.D / l1.lambda_max;
  Dblk.bottomRightCorner(n - m, n - m) = l2.D / l2.lambda_max;
  Symmetrizer s = finish(xi, R.adjoint() * Dblk * R, Regime::small, M);
  if (!(s.certified_c > 0.0))
    throw RegimeBoundary("small regime: a-posteriori check failed at kappa = " + std::to_string(kappa));
  return s;
}

Symmetrizer symmetrizer_large(const LinearSystem& sys, const Vec& xi) {
  const double r = xi.norm();
  if (!(r > 0.0)) throw ValidationError("symmetrizer_large needs xi != 0");
  const Vec w = xi / r;
  const double nu = 1.0 / r;
  const int n = sys.n();
  const CMat A = sys.symbol(w).cast<cplx>();
  const CMat L = sys.source().cast<cplx>();

  const auto groups = eig_grouped(A);  // throws NotSemisimple
  CMat T0(n, n), T0inv(n, n);
  std::vector<Eigen::Index> off;
  Eigen::Index c = 0;
  for (const auto& g : groups) {
    off.push_back(c);
    T0.middleCols(c, g.multiplicity) = g.right;
    T0inv.middleRows(c, g.multiplicity) = g.left;
    c += g.multiplicity;
  }
  const CMat Lp = T0inv * L * T0;

  CMat X = CMat::Zero(n, n);
  CMat Dblk = CMat::Zero(n, n);
  for (std::size_t l = 0; l < groups.size(); ++l) {
    const int al = groups[l].multiplicity;
    const CMat Ll = Lp.block(off[l], off[l], al, al);
    const CVec ev = eigenvalues(Ll);
    Eigen::Index k = 0;
    if (ev.real().maxCoeff(&k) >= -1e-10)
      throw ConditionViolation("(D3) violated at omega = " + fmt_point(w) + ": projected block of group " +
                                   fmt_cplx(groups[l].value) + " has eigenvalue " + fmt_cplx(ev[k]),
                               "D3", w, ev[k]);
    Dblk.block(off[l], off[l], al, al) = lyapunov_symmetrizer(Ll).D;
    for (std::size_t q = 0; q < groups.size(); ++q) {
      if (q == l) continue;
      const int aq = groups[q].multiplicity;
      const cplx diff = groups[l].value - groups[q].value;
      X.block(off[l], off[q], al, aq) = -kI * Lp.block(off[l], off[q], al, aq) / diff;
    }
  }
  const CMat T = T0 * (CMat::Identity(n, n) + nu * X);
  const CMat Tinv = T.partialPivLu().inverse();
  const CMat M = sys.dispersion(xi);
  return finish(xi, Tinv.adjoint() * Dblk * Tinv, Regime::large, M);
}

SymbolModel SymbolModel::from_system(const LinearSystem& sys, std::string name) {
  SymbolModel m;
  m.dim = sys.dim();
  m.n = sys.n();
  m.system = sys;
  m.eval = [sys](const Vec& xi) { return sys.dispersion(xi); };
  m.name = std::move(name);
  return m;
}

SymbolModel SymbolModel::scalar(int dim, bool transport) {
  SymbolModel m;
  m.dim = dim;
  m.n = 1;
  m.isotropic = true;
  m.eval = [transport](const Vec& xi) {
    CMat M(1, 1);
    M(0, 0) = (transport ? -kI * xi[0] : cplx(0.0)) - rho(xi.norm());
    return M;
  };
  m.name = transport ? "scalar-transport" : "scalar";
  return m;
}

namespace detail {
double norm2(const CMat& M) {
  if (M.size() == 1) return std::abs(M(0, 0));
  return Eigen::JacobiSVD<CMat>(M).singularValues()[0];
}
}  // namespace detail

DecayCertificate certify_decay(const SymbolModel& model, const RadialGrid& rgrid, const SphereGrid& sgrid,
                               const std::vector<double>& tgrid) {
  if (sgrid.dim != model.dim) throw ValidationError("sphere grid dimension does not match the symbol");
  DecayCertificate cert;
  cert.grid = sphere_info(sgrid);
  cert.grid.radial_min = rgrid.r_min;
  cert.grid.radial_max = rgrid.r_max;
  cert.grid.radial_count = static_cast<int>(rgrid.radii.size());
  cert.times = tgrid;

  const std::size_t nr = rgrid.radii.size(), nw = sgrid.points.size(), nt = tgrid.size();
  struct Pt {
    double rate;
    cplx lam;
  };
  std::vector<Pt> pts(nr * nw);
  parallel_for(nr * nw, [&](std::size_t idx) {
    const double r = rgrid.radii[idx / nw];
    const CVec ev = eigenvalues(model.eval(r * sgrid.points[idx % nw]));
    Eigen::Index k = 0;
    const double s = ev.real().maxCoeff(&k);
    pts[idx] = {-s / rho(r), ev[k]};
  });

  double c_inf = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < nr; ++i) {
    double row = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nw; ++j) {
      const auto& p = pts[i * nw + j];
      row = std::min(row, p.rate);
      if (p.rate < c_inf) {
        c_inf = p.rate;
        arg = i * nw + j;
      }
    }
    cert.abscissa_rate.emplace_back(rgrid.radii[i], row);
  }
  {
    const double r = rgrid.radii[arg / nw];
    cert.witness.regime = rho(r) < 0.01 ? Regime::small : rho(r) > 0.99 ? Regime::large : Regime::mid;
    cert.witness.xi = r * sgrid.points[arg % nw];
    cert.witness.eigenvalue = pts[arg].lam;
    cert.witness.rate = pts[arg].rate;
    cert.witness.detail = "grid infimum of -max Re spec / rho";
  }

  cert.small_limit = kNaN;
  cert.large_limit = kNaN;
  if (model.system) {
    const AsymptoticLimit sl = small_frequency_limit(*model.system, sgrid);
    const AsymptoticLimit ll = large_frequency_limit(*model.system, sgrid);
    cert.small_limit = sl.rate;
    cert.large_limit = ll.rate;
    if (!sl.note.empty()) cert.notes.push_back(sl.note);
    if (!ll.note.empty()) cert.notes.push_back(ll.note);
    for (const auto* lim : {&sl, &ll}) {
      if (std::isfinite(lim->rate) && lim->rate <= c_inf) {
        c_inf = lim->rate;
        cert.witness.regime = lim == &sl ? Regime::small : Regime::large;
        cert.witness.xi = lim->omega;
        cert.witness.eigenvalue = lim->eigenvalue;
        cert.witness.rate = lim->rate;
        cert.witness.detail = lim == &sl ? "|xi| -> 0 limit: max Re of zeta over omega (xi holds omega)"
                                         : "|xi| -> inf limit: max Re of beta over omega (xi holds omega)";
      }
    }
  } else {
    cert.notes.push_back("closed-form symbol: asymptotic limits not evaluated");
  }
  cert.c_inf = c_inf;
  cert.c = 0.9 * c_inf;

  std::vector<EnvelopeSample> env(nr * nw * nt);
  parallel_for(nr * nw, [&](std::size_t idx) {
    const double r = rgrid.radii[idx / nw];
    const CMat M = model.eval(r * sgrid.points[idx % nw]);
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = tgrid[k];
      const double nrm = norm2(expm(M, t));
      env[idx * nt + k] = {r, static_cast<int>(idx % nw), t, nrm, nrm * std::exp(cert.c * rho(r) * t)};
    }
  });
  cert.C = 0.0;
  for (const auto& e : env) {
    const double ratio = std::isnan(e.ratio) ? std::numeric_limits<double>::infinity() : e.ratio;
    if (ratio > cert.C) {
      cert.C = ratio;
      cert.worst_xi = e.radius * sgrid.points[e.direction];
      cert.worst_t = e.t;
    }
  }
  cert.envelope = std::move(env);
  cert.pass = cert.c > 1e-6 && std::isfinite(cert.C) && cert.C <= 1e6;
  if (!cert.pass && !(cert.c > 1e-6))
    cert.notes.push_back("no positive decay rate: infimum of -max Re spec / rho is " + std::to_string(c_inf) + " (" +
                         std::string(to_string(cert.witness.regime)) + "-frequency regime)");
  return cert;
}

std::vector<RegimeDiagnostic> regime_diagnostics(const LinearSystem& sys, const RadialGrid& rgrid,
                                                 const SphereGrid& sgrid) {
  std::vector<int> dirs;
  const int nw = static_cast<int>(sgrid.points.size());
  const int stride = std::max(1, nw / 16);
  for (int j = 0; j < nw; j += stride) dirs.push_back(j);

  struct Job {
    double r;
    int dir;
    Regime regime;
  };
  std::vector<Job> jobs;
  for (double r : rgrid.radii)
    for (int j : dirs) {
      if (r < 1.0) jobs.push_back({r, j, Regime::small});
      jobs.push_back({r, j, Regime::mid});
      if (r > 1.0) jobs.push_back({r, j, Regime::large});
    }
  std::vector<RegimeDiagnostic> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& job = jobs[i];
    RegimeDiagnostic d{job.r, job.dir, job.regime, std::nullopt, {}};
    const Vec& w = sgrid.points[job.dir];
    try {
      Symmetrizer s = job.regime == Regime::small ? symmetrizer_small(sys, job.r, w)
                      : job.regime == Regime::mid ? symmetrizer_mid(sys, job.r * w)
                                                  : symmetrizer_large(sys, job.r * w);
      d.certified_c = s.certified_c;
    } catch (const std::exception& e) {
      d.error = e.what();
    }
    out[i] = std::move(d);
  });
  return out;
}

std::vector<double> geometric_times(double t_min, double t_max, int count) {
  std::vector<double> t(count);
  for (int k = 0; k < count; ++k)
    t[k] = count == 1 ? t_min : t_min * std::pow(t_max / t_min, double(k) / (count - 1));
  return t;
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, Vec& x, Vec& w) {
  Mat J = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  x = es.eigenvalues();
  w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

double sphere_area(int d) { return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d); }

}  // namespace

SemigroupDecay semigroup_decay(const SymbolModel& model, const std::vector<double>& tgrid,
                               const std::optional<SphereGrid>& sgrid) {
  constexpr double kRmin = 1e-4, kRmax = 1e4;
  constexpr int kNodes = 128;
  const int d = model.dim;
  SemigroupDecay out;
  out.dim = d;
  out.times = tgrid;

  std::vector<Vec> dirs;
  std::vector<double> dir_w;
  if (model.isotropic) {
    dirs.push_back(Vec::Unit(d, 0));
    dir_w.push_back(sphere_area(d));
  } else {
    const SphereGrid g = sgrid ? *sgrid : SphereGrid::make(d, d == 2 ? 64 : d == 3 ? 200 : 0);
    if (g.dim != d) throw ValidationError("sphere grid dimension does not match the symbol");
    dirs = g.points;
    dir_w.assign(dirs.size(), sphere_area(d) / double(dirs.size()));
  }

  Vec x, w;
  gauss_legendre(kNodes, x, w);
  const double a = std::log(kRmin), b = std::log(kRmax);
  const std::size_t nt = tgrid.size();
  const std::size_t jobs = kNodes * dirs.size();
  Mat contrib(jobs, nt);
  double sup_norm = 0.0;
  std::vector<double> sup_local(jobs, 0.0);
  std::vector<double> edge(nt, 0.0);
  parallel_for(jobs, [&](std::size_t idx) {
    const int k = static_cast<int>(idx / dirs.size());
    const std::size_t j = idx % dirs.size();
    const double s = 0.5 * (b - a) * x[k] + 0.5 * (a + b);
    const double r = std::exp(s);
    const double weight = 0.5 * (b - a) * w[k] * std::pow(r, d) * dir_w[j];  // dr = r ds
    const CMat M = model.eval(r * dirs[j]);
    for (std::size_t q = 0; q < nt; ++q) {
      const double nrm = norm2(expm(M, tgrid[q]));
      contrib(idx, q) = weight * nrm * nrm;
      sup_local[idx] = std::max(sup_local[idx], nrm);
    }
  });
  for (double v : sup_local) sup_norm = std::max(sup_norm, v);
  // Truncation indicator at the upper end: integrand at r_max over one unit of log r.
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    const CMat M = model.eval(kRmax * dirs[j]);
    for (std::size_t q = 0; q < nt; ++q) {
      const double nrm = norm2(expm(M, tgrid[q]));
      edge[q] += std::pow(kRmax, d) * nrm * nrm * dir_w[j];
    }
  }

  out.G.resize(nt);
  std::vector<double> lx, ly;
  for (std::size_t q = 0; q < nt; ++q) {
    double g2 = 0.0;
    for (std::size_t i = 0; i < jobs; ++i) g2 += contrib(i, q);  // fixed order
    out.G[q] = std::sqrt(g2);
    const double t = tgrid[q];
    if (t >= 1e2 * (1 - 1e-12) && t <= 1e4 * (1 + 1e-12)) {
      const double lower = sup_norm * sup_norm * sphere_area(d) * std::pow(kRmin, d) / d / g2;
      const double upper = edge[q] / g2;
      out.lower_tail = std::max(out.lower_tail, lower);
      out.upper_tail = std::max(out.upper_tail, upper);
      if (lower > 0.05)
        throw QuadratureError("semigroup quadrature: lower tail bound " + std::to_string(lower) +
                              " of G^2 at t = " + std::to_string(t) + "; lower the radial minimum");
      if (upper > 0.05)
        throw QuadratureError("semigroup quadrature: integrand not negligible at |xi| = 1e4 (t = " +
                              std::to_string(t) + "); the symbol may lack high-frequency damping");
      lx.push_back(std::log1p(t));
      ly.push_back(std::log(out.G[q]));
    }
  }
  if (lx.size() < 2) {
    out.notes.push_back("fewer than two times in [1e2, 1e4]; slope not fitted");
    out.slope = kNaN;
    return out;
  }
  const Eigen::Index n = static_cast<Eigen::Index>(lx.size());
  Mat Afit(n, 2);
  Vec yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Afit(i, 0) = 1.0;
    Afit(i, 1) = lx[i];
    yv[i] = ly[i];
  }
  const Vec coef = Afit.colPivHouseholderQr().solve(yv);
  out.slope = coef[1];
  out.fit_residual = (Afit * coef - yv).norm() / std::sqrt(double(n));
  out.notes.push_back("frequencies above 1e4 belong to the exponentially decaying high-frequency part");
  return out;
}

}  // namespace hbl
