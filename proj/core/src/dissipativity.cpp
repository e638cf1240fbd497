#include "hbl/dissipativity.hpp"

#include "hbl/errors.hpp"
#include "hbl/parallel.hpp"
#include "hbl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "detail/report_util.hpp"

namespace hbl {

namespace detail {

void finalize(ConditionReport& rep) {
  if (!std::isfinite(rep.margin)) rep.margin = rep.verdict == Verdict::fails ? -1.0 : 1.0;
  if (rep.verdict == Verdict::fails) {
    rep.margin = std::min(rep.margin, -std::numeric_limits<double>::min());
    if (rep.witnesses.empty()) rep.witnesses.push_back({Vec(), cplx{}, rep.margin, "violation without located point"});
  } else {
    rep.margin = std::max(rep.margin, std::numeric_limits<double>::min());
  }
}

GridInfo sphere_info(const SphereGrid& g) {
  GridInfo info;
  info.dim = g.dim;
  info.sphere_points = static_cast<int>(g.points.size());
  return info;
}

std::string fmt_point(const Vec& p) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

std::string fmt_cplx(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

Vec refine_on_sphere(const Vec& w0, double step, const std::function<double(const Vec&)>& f, double& best) {
  const auto d = w0.size();
  Vec w = w0;
  if (d < 2) return w;
  int evals = 0;
  while (step > 1e-10 && evals < 400) {
    // Tangent basis at w from a Householder QR of w.
    Eigen::HouseholderQR<Mat> qr(w);
    const Mat Q = qr.householderQ();
    bool improved = false;
    for (Eigen::Index k = 1; k < d && !improved; ++k) {
      for (double s : {1.0, -1.0}) {
        Vec cand = w + s * step * Q.col(k);
        cand.normalize();
        const double v = f(cand);
        ++evals;
        if (v < best) {
          best = v;
          w = cand;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return w;
}

Vec refine_in_space(const Vec& x0, double rel_step, const std::function<double(const Vec&)>& f, double& best) {
  const auto d = x0.size();
  Vec x = x0;
  int evals = 0;
  double step = rel_step;
  while (step > 1e-10 && evals < 400) {
    bool improved = false;
    for (Eigen::Index k = 0; k < d && !improved; ++k) {
      for (double s : {1.0, -1.0}) {
        Vec cand = x;
        cand[k] += s * step * x.norm();
        if (cand.norm() == 0.0) continue;
        const double v = f(cand);
        ++evals;
        if (v < best) {
          best = v;
          x = cand;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

}  // namespace detail

using namespace detail;

namespace {

constexpr double kFailMargin = -1e-9;
constexpr std::size_t kMaxWitnesses = 8;

struct ScPoint {
  bool precondition_ok = true;
  double margin = std::numeric_limits<double>::infinity();
  cplx eigenvalue{};
  cplx group{};
  std::vector<int> pattern;
  std::string detail;
};

ScPoint eval_sc(const MatrixFamily& H, const MatrixFamily& h, const Vec& w, double tol) {
  ScPoint out;
  const CMat Hm = H(w);
  const CMat hm = h(w);
  std::vector<EigenGroup> groups;
  try {
    groups = eig_grouped(Hm);
  } catch (const NotSemisimple& e) {
    out.precondition_ok = false;
    out.margin = -1.0;
    out.eigenvalue = e.eigenvalue();
    out.group = e.eigenvalue();
    out.detail = "reference matrix not semi-simple at eigenvalue " + fmt_cplx(e.eigenvalue());
    return out;
  }
  const double imag_tol = 1e-8 * (1.0 + Hm.norm());
  for (const auto& g : groups) {
    out.pattern.push_back(g.multiplicity);
    if (std::abs(g.value.real()) > imag_tol) {
      out.precondition_ok = false;
      out.margin = -std::abs(g.value.real());
      out.eigenvalue = g.value;
      out.group = g.value;
      out.detail = "reference spectrum not purely imaginary: " + fmt_cplx(g.value);
      return out;
    }
    const CVec ev = eigenvalues(g.project(hm));
    Eigen::Index k = 0;
    const double max_re = ev.real().maxCoeff(&k);
    const double m = -max_re - tol;
    if (m < out.margin) {
      out.margin = m;
      out.eigenvalue = ev[k];
      out.group = g.value;
    }
  }
  std::sort(out.pattern.begin(), out.pattern.end());
  return out;
}

struct Violation {
  Vec point;
  double margin;
  cplx eigenvalue;
  std::string detail;
};

void add_witnesses(ConditionReport& rep, std::vector<Violation> v) {
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) { return a.margin < b.margin; });
  for (std::size_t i = 0; i < v.size() && rep.witnesses.size() < kMaxWitnesses; ++i)
    rep.witnesses.push_back({v[i].point, v[i].eigenvalue, v[i].margin, v[i].detail});
}

double sphere_step(const SphereGrid& g) {
  if (g.dim < 2 || g.points.size() < 2) return 0.0;
  if (g.dim == 2) return 2.0 * M_PI / double(g.points.size());
  return std::sqrt(4.0 * M_PI / double(g.points.size()));
}

using SpectrumFn = std::function<CVec(const Vec&)>;

ConditionReport d1_scan(const std::string& name, const SpectrumFn& spectrum, const RadialGrid& rg,
                        const SphereGrid& sg) {
  ConditionReport rep;
  rep.condition = name;
  rep.grid = sphere_info(sg);
  rep.grid.radial_min = rg.r_min;
  rep.grid.radial_max = rg.r_max;
  rep.grid.radial_count = static_cast<int>(rg.radii.size());

  const std::size_t nr = rg.radii.size(), nw = sg.points.size();
  struct Pt {
    double s;
    cplx lam;
  };
  std::vector<Pt> pts(nr * nw);
  parallel_for(nr * nw, [&](std::size_t idx) {
    const double r = rg.radii[idx / nw];
    const CVec ev = spectrum(r * sg.points[idx % nw]);
    Eigen::Index k = 0;
    const double s = ev.real().maxCoeff(&k);
    pts[idx] = {s, ev[k]};
  });

  auto normalized = [&](const Vec& xi) {
    const CVec ev = spectrum(xi);
    return -ev.real().maxCoeff() / rho(xi.norm()) - 1e-10;
  };

  double margin = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> raw;
  for (std::size_t i = 0; i < nr; ++i) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nw; ++j) {
      const auto& p = pts[i * nw + j];
      worst = std::max(worst, p.s);
      const double m = -p.s / rho(rg.radii[i]) - 1e-10;
      margin = std::min(margin, m);
      if (m <= 0.0) raw.push_back(i * nw + j);
    }
    rep.curve.push_back({rg.radii[i], worst});
  }

  std::vector<Violation> confirmed, unconfirmed;
  std::sort(raw.begin(), raw.end(), [&](std::size_t a, std::size_t b) {
    return -pts[a].s / rho(rg.radii[a / nw]) < -pts[b].s / rho(rg.radii[b / nw]);
  });
  const double rel = nr > 1 ? std::log(rg.radii[1] / rg.radii[0]) : 0.1;
  for (std::size_t q = 0; q < raw.size() && q < 5; ++q) {
    const std::size_t idx = raw[q];
    Vec xi = rg.radii[idx / nw] * sg.points[idx % nw];
    double best = normalized(xi);
    xi = refine_in_space(xi, rel, normalized, best);
    const CVec ev = spectrum(xi);
    Eigen::Index k = 0;
    ev.real().maxCoeff(&k);
    Violation v{xi, best, ev[k], "max Re spec at |xi| = " + std::to_string(xi.norm())};
    margin = std::min(margin, best);
    (best < kFailMargin ? confirmed : unconfirmed).push_back(std::move(v));
  }

  // A rounding-level real part that persists over several radii is a structural zero.
  std::vector<std::size_t> radii_hit;
  for (std::size_t idx : raw) radii_hit.push_back(idx / nw);
  std::sort(radii_hit.begin(), radii_hit.end());
  const bool persistent = std::unique(radii_hit.begin(), radii_hit.end()) - radii_hit.begin() >= 3;
  if (confirmed.empty() && persistent) std::swap(confirmed, unconfirmed);

  if (!confirmed.empty()) {
    rep.verdict = Verdict::fails;
    add_witnesses(rep, confirmed);
  } else if (!raw.empty()) {
    rep.verdict = Verdict::inconclusive;
    add_witnesses(rep, unconfirmed);
    rep.notes.push_back("grid violations did not survive refinement below -1e-9");
  }

  // Asymptotic guards: only a clearly positive real part counts as a failure.
  for (double r : rg.guards) {
    for (const auto& w : sg.points) {
      const Vec xi = r * w;
      const CVec ev = spectrum(xi);
      Eigen::Index k = 0;
      const double s = ev.real().maxCoeff(&k);
      const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
      if (s > 1e-12 * scale) {
        rep.verdict = Verdict::fails;
        const double m = -s / rho(r);
        margin = std::min(margin, m);
        rep.witnesses.push_back({xi, ev[k], m, "positive real part at asymptotic guard |xi| = " + std::to_string(r)});
      } else if (-s / rho(r) - 1e-10 <= 0.0) {
        rep.notes.push_back("guard |xi| = " + std::to_string(r) + ": real part within rounding of 0, endpoint decided by " +
                            (r < 1.0 ? "(D2)" : "(D3)"));
        break;
      }
    }
  }
  rep.margin = margin;
  finalize(rep);
  return rep;
}

}  // namespace

ConditionReport stable_compat(const MatrixFamily& H, const MatrixFamily& h, const SphereGrid& grid, double tol,
                              const std::string& name) {
  ConditionReport rep;
  rep.condition = name;
  rep.grid = sphere_info(grid);
  const std::size_t N = grid.points.size();
  std::vector<ScPoint> pts(N);
  parallel_for(N, [&](std::size_t i) { pts[i] = eval_sc(H, h, grid.points[i], tol); });

  double margin = std::numeric_limits<double>::infinity();
  std::vector<Violation> structural, raw_pts;
  std::vector<std::size_t> raw;
  std::map<std::vector<int>, int> patterns;
  for (std::size_t i = 0; i < N; ++i) {
    const auto& p = pts[i];
    margin = std::min(margin, p.margin);
    if (!p.precondition_ok) {
      structural.push_back({grid.points[i], p.margin, p.eigenvalue, p.detail});
      continue;
    }
    ++patterns[p.pattern];
    if (p.margin <= 0.0) raw.push_back(i);
  }

  std::vector<Violation> confirmed, unconfirmed;
  std::sort(raw.begin(), raw.end(), [&](std::size_t a, std::size_t b) { return pts[a].margin < pts[b].margin; });
  const double step = sphere_step(grid);
  for (std::size_t q = 0; q < raw.size(); ++q) {
    const std::size_t i = raw[q];
    Vec w = grid.points[i];
    double best = pts[i].margin;
    if (q < 5 && step > 0.0) {
      auto f = [&](const Vec& x) {
        const ScPoint e = eval_sc(H, h, x, tol);
        return e.margin;
      };
      w = refine_on_sphere(w, step, f, best);
    }
    const ScPoint e = eval_sc(H, h, w, tol);
    margin = std::min(margin, best);
    Violation v{w, best, e.eigenvalue,
                "projected block of group " + fmt_cplx(e.group) + " has eigenvalue " + fmt_cplx(e.eigenvalue)};
    (best < kFailMargin ? confirmed : unconfirmed).push_back(std::move(v));
  }

  if (!structural.empty() || !confirmed.empty()) {
    rep.verdict = Verdict::fails;
    add_witnesses(rep, structural);
    add_witnesses(rep, confirmed);
  } else if (!unconfirmed.empty()) {
    rep.verdict = Verdict::inconclusive;
    add_witnesses(rep, unconfirmed);
    rep.notes.push_back("grid violations did not survive refinement below -1e-9");
  } else if (patterns.size() > 1) {
    rep.verdict = Verdict::inconclusive;
    rep.notes.push_back("eigen-group multiplicities vary over the sphere (" + std::to_string(patterns.size()) +
                        " patterns); pointwise (SC)' holds everywhere");
  }
  rep.margin = margin;
  finalize(rep);
  return rep;
}

ConditionReport check_H(const LinearSystem& sys, const SphereGrid& grid) {
  ConditionReport rep;
  rep.condition = "H";
  rep.grid = sphere_info(grid);
  const std::size_t N = grid.points.size();
  std::vector<SemisimpleResult> res(N);
  parallel_for(N, [&](std::size_t i) { res[i] = is_real_semisimple(sys.symbol(grid.points[i])); });

  double margin = std::numeric_limits<double>::infinity();
  std::map<std::vector<int>, int> patterns;
  std::vector<Violation> fails, unsure;
  for (std::size_t i = 0; i < N; ++i) {
    margin = std::min(margin, res[i].margin);
    ++patterns[res[i].multiplicities];
    if (res[i].verdict == Verdict::fails)
      fails.push_back({grid.points[i], res[i].margin, res[i].witness,
                       "eigenvalue " + fmt_cplx(res[i].witness) + " is not real or not semi-simple"});
    else if (res[i].verdict == Verdict::inconclusive)
      unsure.push_back({grid.points[i], res[i].margin, res[i].witness, "borderline rank decision"});
  }
  if (!fails.empty()) {
    rep.verdict = Verdict::fails;
    add_witnesses(rep, fails);
  } else if (!unsure.empty()) {
    rep.verdict = Verdict::inconclusive;
    add_witnesses(rep, unsure);
  } else if (patterns.size() > 1) {
    rep.verdict = Verdict::inconclusive;
    rep.notes.push_back("real semi-simple everywhere but multiplicities vary over the sphere");
  }
  rep.margin = margin;
  finalize(rep);
  return rep;
}

ConditionReport check_RH(const LinearSystem& sys) {
  ConditionReport rep;
  rep.condition = "RH";
  const Mat L = sys.L_block();
  const CVec ev = eigenvalues(L.cast<cplx>());
  Eigen::Index k = 0;
  const double max_re = ev.real().maxCoeff(&k);
  rep.margin = -max_re - 1e-10;
  if (rep.margin <= 0.0) {
    rep.verdict = Verdict::fails;
    rep.witnesses.push_back({Vec(), ev[k], rep.margin, "eigenvalue of q_v with real part >= -1e-10"});
  }
  finalize(rep);
  return rep;
}

ConditionReport check_RH(const BalanceLawSpec& spec) {
  spec.validate();
  return check_RH(LinearSystem(spec.flux_jacobians, spec.source_jacobian, spec.m));
}

ConditionReport check_K(const LinearSystem& sys, const SphereGrid& grid) {
  ConditionReport rep;
  rep.condition = "K";
  rep.grid = sphere_info(grid);
  const int n = sys.n();
  const Mat& Lfull = sys.source();
  const std::size_t N = grid.points.size();
  struct Pt {
    double sigma = std::numeric_limits<double>::infinity();
    double thr = 0.0;
    double lambda = 0.0;
    int skipped = 0;
  };
  std::vector<Pt> pts(N);
  parallel_for(N, [&](std::size_t i) {
    const Mat A = sys.symbol(grid.points[i]);
    const CVec ev = eigenvalues(A.cast<cplx>());
    const double scale = 1.0 + A.norm() + Lfull.norm();
    Pt p;
    p.thr = 1e-8 * scale;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      if (std::abs(ev[k].imag()) > 1e-8 * scale) {
        ++p.skipped;
        continue;
      }
      const double lam = ev[k].real();
      Mat S(2 * n, n);
      S << lam * Mat::Identity(n, n) - A, Lfull;
      Eigen::JacobiSVD<Mat> svd(S);
      const double s = svd.singularValues()[n - 1];
      if (s < p.sigma) {
        p.sigma = s;
        p.lambda = lam;
      }
    }
    pts[i] = p;
  });
  double margin = std::numeric_limits<double>::infinity();
  std::vector<Violation> fails, unsure;
  int skipped = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto& p = pts[i];
    skipped += p.skipped;
    if (!std::isfinite(p.sigma)) continue;
    const double m = p.sigma - p.thr;
    margin = std::min(margin, m);
    if (m <= 0.0)
      fails.push_back({grid.points[i], m, cplx(p.lambda, 0.0), "eigenvector of A(omega) lies in ker of the source"});
    else if (p.sigma < 100.0 * p.thr)
      unsure.push_back({grid.points[i], m, cplx(p.lambda, 0.0), "near-intersection of eigenspace and source kernel"});
  }
  if (!fails.empty()) {
    rep.verdict = Verdict::fails;
    add_witnesses(rep, fails);
  } else if (!unsure.empty()) {
    rep.verdict = Verdict::inconclusive;
    add_witnesses(rep, unsure);
  }
  if (skipped > 0) rep.notes.push_back(std::to_string(skipped) + " non-real eigenvalues skipped");
  rep.margin = margin;
  finalize(rep);
  return rep;
}

ConditionReport check_D1(const LinearSystem& sys, const RadialGrid& rgrid, const SphereGrid& sgrid) {
  return d1_scan("D1", [&](const Vec& xi) { return eigenvalues(sys.dispersion(xi)); }, rgrid, sgrid);
}

ConditionReport check_D2(const LinearSystem& sys, const SphereGrid& grid, double tol) {
  if (!sys.in_normal_form(1e-12)) throw ValidationError("check_D2 requires a system in normal form");
  ConditionReport rep;
  rep.condition = "D2";
  rep.grid = sphere_info(grid);

  std::vector<Violation> fails, unsure;
  double semi_margin = std::numeric_limits<double>::infinity();
  for (const auto& w : grid.points) {
    const auto r = is_real_semisimple(sys.A11(w));
    semi_margin = std::min(semi_margin, r.margin);
    if (r.verdict == Verdict::fails)
      fails.push_back({w, r.margin, r.witness, "A11 eigenvalue " + fmt_cplx(r.witness) + " not real semi-simple"});
    else if (r.verdict == Verdict::inconclusive)
      unsure.push_back({w, r.margin, r.witness, "A11 borderline semi-simplicity"});
  }
  if (!fails.empty()) {
    rep.verdict = Verdict::fails;
    add_witnesses(rep, fails);
    rep.margin = semi_margin;
    rep.notes.push_back("A11(omega) is not real semi-simple");
    finalize(rep);
    return rep;
  }

  auto H = [&](const Vec& w) -> CMat { return -kI * sys.A11(w).cast<cplx>(); };
  auto h = [&](const Vec& w) -> CMat { return sys.reduced_coupling(w).cast<cplx>(); };
  ConditionReport sc = stable_compat(H, h, grid, tol, "D2");
  sc.verdict = weakest(sc.verdict, unsure.empty() ? Verdict::holds : Verdict::inconclusive);
  if (!unsure.empty() && sc.verdict == Verdict::inconclusive) add_witnesses(sc, unsure);
  finalize(sc);
  return sc;
}

ConditionReport check_D3(const LinearSystem& sys, const SphereGrid& grid, double tol) {
  const CMat L = sys.source().cast<cplx>();
  auto H = [&](const Vec& w) -> CMat { return -kI * sys.symbol(w).cast<cplx>(); };
  auto h = [&](const Vec&) -> CMat { return L; };
  return stable_compat(H, h, grid, tol, "D3");
}

Mat spd_sqrt(const Mat& B, double max_cond) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (B + B.transpose()));
  const Vec& lam = es.eigenvalues();
  if (!(lam[0] > 0.0) || lam[lam.size() - 1] / lam[0] > max_cond)
    throw ValidationError("matrix square root: not positive definite or condition number above guard");
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

namespace detail {
ConditionReport jinxin_d1(const JinXinSpec& jx, const RadialGrid& rg, const SphereGrid& sg) {
  JinXinSpec unit = jx;
  unit.eps = 1.0;
  const WaveCoefficients wave = second_order_reduction(unit);
  return d1_scan("D1_2", [&](const Vec& xi) { return wave.pencil_roots(xi); }, rg, sg);
}
}  // namespace detail

}  // namespace hbl
