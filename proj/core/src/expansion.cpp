#include "hbl/decay.hpp"
#include "hbl/errors.hpp"
#include "hbl/parallel.hpp"
#include "hbl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail/asymptotics.hpp"
#include "detail/report_util.hpp"

namespace hbl {

using namespace detail;

namespace {

Vec unit(const Vec& v) { return v / v.norm(); }

std::vector<cplx> to_vector(const CVec& v) { return std::vector<cplx>(v.data(), v.data() + v.size()); }

// Greedy nearest pairing; result[i] is the index in b paired with a[i].
std::vector<int> pair_nearest(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  struct Cand {
    double dist;
    int i, j;
  };
  std::vector<Cand> all;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    for (int j = 0; j < static_cast<int>(b.size()); ++j) all.push_back({std::abs(a[i] - b[j]), i, j});
  std::stable_sort(all.begin(), all.end(), [](const Cand& x, const Cand& y) { return x.dist < y.dist; });
  std::vector<int> out(a.size(), -1);
  std::vector<bool> taken(b.size(), false);
  for (const auto& c : all)
    if (out[c.i] < 0 && !taken[c.j]) {
      out[c.i] = c.j;
      taken[c.j] = true;
    }
  return out;
}

// The alpha unused eigenvalues closest to `target`; flags a crossing when the
// next candidate is not clearly farther away.
std::vector<cplx> take_branch(const CVec& ev, cplx target, int alpha, std::vector<bool>& used, double location) {
  std::vector<int> idx;
  for (int i = 0; i < ev.size(); ++i)
    if (!used[i]) idx.push_back(i);
  if (static_cast<int>(idx.size()) < alpha) throw CrossingDetected("branch matching ran out of eigenvalues", location);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int x, int y) { return std::abs(ev[x] - target) < std::abs(ev[y] - target); });
  const double inner = std::abs(ev[idx[alpha - 1]] - target);
  if (static_cast<int>(idx.size()) > alpha) {
    const double outer = std::abs(ev[idx[alpha]] - target);
    if (outer < 2.0 * inner)
      throw CrossingDetected("eigenvalue branches collide near " + fmt_cplx(target) + " at parameter " +
                                 std::to_string(location),
                             location);
  }
  std::vector<cplx> out;
  for (int k = 0; k < alpha; ++k) {
    used[idx[k]] = true;
    out.push_back(ev[idx[k]]);
  }
  return out;
}

std::vector<cplx> richardson(const std::vector<cplx>& coarse, const std::vector<cplx>& fine) {
  const auto p = pair_nearest(fine, coarse);
  std::vector<cplx> out(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) out[i] = 2.0 * fine[i] - coarse[p[i]];
  return out;
}

double rel_dev(cplx a, cplx b, double floor) { return std::abs(a - b) / std::max(std::abs(b), floor); }

LinearSystem ensure_normal_form(const LinearSystem& sys) {
  return sys.in_normal_form(1e-12) ? sys : normal_form(sys);
}

}  // namespace

double AsymptoticExpansion::max_deviation() const {
  double m = 0.0;
  for (const auto& b : small) m = std::max(m, b.deviation);
  for (const auto& b : large) m = std::max(m, b.deviation);
  return m;
}

namespace detail {

AsymptoticLimit small_frequency_limit(const LinearSystem& sys, const SphereGrid& grid) {
  const LinearSystem nf = ensure_normal_form(sys);
  const std::size_t N = grid.points.size();
  std::vector<AsymptoticLimit> per(N);
  parallel_for(N, [&](std::size_t i) {
    const Vec& w = grid.points[i];
    AsymptoticLimit a;
    a.omega = w;
    const Mat A11 = nf.A11(w);
    const auto semi = is_real_semisimple(A11);
    if (semi.verdict == Verdict::fails) {
      a.rate = 0.0;
      a.eigenvalue = semi.witness;
      a.note = "A11(omega) not real semi-simple: small-frequency expansion undefined";
      per[i] = a;
      return;
    }
    const auto groups = eig_grouped(A11.cast<cplx>());
    const CMat h = nf.reduced_coupling(w).cast<cplx>();
    a.rate = std::numeric_limits<double>::infinity();
    for (const auto& g : groups) {
      const CVec z = eigenvalues(g.project(h));
      Eigen::Index k = 0;
      const double mr = z.real().maxCoeff(&k);
      if (-mr < a.rate) {
        a.rate = -mr;
        a.eigenvalue = z[k];
      }
    }
    per[i] = a;
  });
  AsymptoticLimit out = per.front();
  for (const auto& a : per)
    if (a.rate < out.rate) out = a;
  return out;
}

AsymptoticLimit large_frequency_limit(const LinearSystem& sys, const SphereGrid& grid) {
  const std::size_t N = grid.points.size();
  const CMat L = sys.source().cast<cplx>();
  std::vector<AsymptoticLimit> per(N);
  parallel_for(N, [&](std::size_t i) {
    const Vec& w = grid.points[i];
    AsymptoticLimit a;
    a.omega = w;
    std::vector<EigenGroup> groups;
    try {
      groups = eig_grouped(sys.symbol(w).cast<cplx>());
    } catch (const NotSemisimple& e) {
      a.rate = 0.0;
      a.eigenvalue = e.eigenvalue();
      a.note = "A(omega) not semi-simple: large-frequency expansion undefined";
      per[i] = a;
      return;
    }
    a.rate = std::numeric_limits<double>::infinity();
    for (const auto& g : groups) {
      const CVec z = eigenvalues(g.project(L));
      Eigen::Index k = 0;
      const double mr = z.real().maxCoeff(&k);
      if (-mr < a.rate) {
        a.rate = -mr;
        a.eigenvalue = z[k];
      }
    }
    per[i] = a;
  });
  AsymptoticLimit out = per.front();
  for (const auto& a : per)
    if (a.rate < out.rate) out = a;
  return out;
}

}  // namespace detail

AsymptoticExpansion expand_small(const LinearSystem& sys, const Vec& omega, double h) {
  if (!(h > 0.0)) throw ValidationError("expand_small needs a positive step");
  const Vec w = unit(omega);
  const LinearSystem nf = ensure_normal_form(sys);
  AsymptoticExpansion out;
  out.omega = w;
  out.h = h;

  const Mat A11 = nf.A11(w);
  const auto semi = is_real_semisimple(A11);
  if (semi.verdict == Verdict::fails)
    throw NotSemisimple("expand_small: A11(omega) is not real semi-simple", semi.witness);
  const auto groups = eig_grouped(A11.cast<cplx>());
  const CMat hm = nf.reduced_coupling(w).cast<cplx>();
  const double floor = 1e-6 * (1.0 + hm.norm());

  const double kappas[2] = {h, 0.5 * h};
  std::vector<std::vector<std::vector<cplx>>> zt(2);  // [level][group] -> ζ̃ values
  std::vector<std::vector<cplx>> fast(2);
  for (int lv = 0; lv < 2; ++lv) {
    const double k = kappas[lv];
    const CVec ev = eigenvalues(nf.dispersion(k * w));
    std::vector<bool> used(ev.size(), false);
    for (const auto& g : groups) {
      const cplx mu(g.value.real(), 0.0);
      auto br = take_branch(ev, -kI * k * mu, g.multiplicity, used, k);
      for (auto& l : br) l = (l + kI * k * mu) / (k * k);
      zt[lv].push_back(br);
    }
    for (int i = 0; i < ev.size(); ++i)
      if (!used[i]) fast[lv].push_back(ev[i]);
  }

  for (std::size_t l = 0; l < groups.size(); ++l) {
    const auto proj = to_vector(eigenvalues(groups[l].project(hm)));
    const auto fd = richardson(zt[0][l], zt[1][l]);
    const auto p = pair_nearest(proj, fd);
    for (std::size_t i = 0; i < proj.size(); ++i) {
      ExpansionBranch b;
      b.leading = cplx(groups[l].value.real(), 0.0);
      b.projected = proj[i];
      b.finite_difference = fd[p[i]];
      b.deviation = rel_dev(b.finite_difference, b.projected, floor);
      out.small.push_back(b);
    }
  }

  out.nu_limits = richardson(fast[0], fast[1]);
  out.L_spectrum = to_vector(eigenvalues(nf.L_block().cast<cplx>()));
  const auto p = pair_nearest(out.L_spectrum, out.nu_limits);
  for (std::size_t i = 0; i < out.L_spectrum.size(); ++i)
    out.nu_deviation = std::max(out.nu_deviation, std::abs(out.L_spectrum[i] - out.nu_limits[p[i]]));
  return out;
}

AsymptoticExpansion expand_large(const LinearSystem& sys, const Vec& omega, double h) {
  if (!(h > 0.0)) throw ValidationError("expand_large needs a positive step");
  const Vec w = unit(omega);
  AsymptoticExpansion out;
  out.omega = w;
  out.h = h;
  const auto groups = eig_grouped(sys.symbol(w).cast<cplx>());
  const CMat L = sys.source().cast<cplx>();
  const double floor = 1e-6 * (1.0 + L.norm());

  auto branches = [&](double R) {
    const CVec ev = eigenvalues(sys.dispersion(R * w));
    std::vector<bool> used(ev.size(), false);
    std::vector<std::vector<cplx>> res;
    for (const auto& g : groups) {
      const cplx gam(g.value.real(), 0.0);
      auto br = take_branch(ev, -kI * R * gam, g.multiplicity, used, R);
      for (auto& l : br) l += kI * R * gam;
      res.push_back(br);
    }
    return res;
  };
  const auto coarse = branches(1.0 / h);
  const auto fine = branches(2.0 / h);
  for (std::size_t l = 0; l < groups.size(); ++l) {
    const auto proj = to_vector(eigenvalues(groups[l].project(L)));
    const auto fd = richardson(coarse[l], fine[l]);
    const auto p = pair_nearest(proj, fd);
    for (std::size_t i = 0; i < proj.size(); ++i) {
      ExpansionBranch b;
      b.leading = cplx(groups[l].value.real(), 0.0);
      b.projected = proj[i];
      b.finite_difference = fd[p[i]];
      b.deviation = rel_dev(b.finite_difference, b.projected, floor);
      out.large.push_back(b);
    }
  }
  for (double R : {1e3, 1e4}) {
    auto& dst = R == 1e3 ? out.large_raw_1e3 : out.large_raw_1e4;
    for (const auto& br : branches(R))
      for (cplx v : br) dst.push_back(v);
  }
  return out;
}

}  // namespace hbl
