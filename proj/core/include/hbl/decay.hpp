#pragma once

#include "hbl/dissipativity.hpp"
#include "hbl/grids.hpp"
#include "hbl/model.hpp"
#include "hbl/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hbl {

enum class Regime { small, mid, large };
std::string_view to_string(Regime r);

struct Symmetrizer {
  Vec xi;
  CMat D;  // Hermitian, scaled to lambda_max(D) = 1
  Regime regime = Regime::mid;
  double certified_c = 0.0;  // lambda_min(-Re(D M(xi))) / rho(|xi|)
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Re(D M) + c rho I, the quantity whose largest eigenvalue must be <= 0.
double symmetrizer_defect(const Symmetrizer& s, const CMat& M);

Symmetrizer symmetrizer_mid(const LinearSystem& sys, const Vec& xi);
Symmetrizer symmetrizer_small(const LinearSystem& sys, double kappa, const Vec& omega);
Symmetrizer symmetrizer_large(const LinearSystem& sys, const Vec& xi);

// A Fourier symbol ξ -> M(ξ), either from a linear system or a closed form.
struct SymbolModel {
  int dim = 1;
  int n = 1;
  std::function<CMat(const Vec&)> eval;
  bool isotropic = false;  // ||exp(M(ξ)t)|| depends on |ξ| only
  std::optional<LinearSystem> system;
  std::string name;

  static SymbolModel from_system(const LinearSystem& sys, std::string name = "system");
  // -i ξ_1 - rho(|ξ|) (transport) or -rho(|ξ|).
  static SymbolModel scalar(int dim, bool transport = true);
};

struct DecayWitness {
  Regime regime = Regime::mid;
  Vec xi;  // empty for an asymptotic limit
  cplx eigenvalue{};
  double rate = 0.0;  // -Re(eigenvalue)/rho at the witness, or the asymptotic rate
  std::string detail;
};

struct EnvelopeSample {
  double radius;
  int direction;
  double t;
  double norm;   // ||exp(M(ξ)t)||_2
  double ratio;  // norm / exp(-c rho t)
};

struct DecayCertificate {
  GridInfo grid;
  std::vector<double> times;
  double c_inf = 0.0;     // infimum of -max Re spec / rho incl. asymptotic limits
  double c = 0.0;         // 0.9 c_inf
  double C = 0.0;         // max envelope ratio
  double small_limit = 0.0;  // -max Re ζ (NaN when unavailable)
  double large_limit = 0.0;  // -max Re β (NaN when unavailable)
  bool pass = false;
  Vec worst_xi;
  double worst_t = 0.0;
  DecayWitness witness;  // location of c_inf
  std::vector<EnvelopeSample> envelope;
  std::vector<std::pair<double, double>> abscissa_rate;  // (|ξ|, min_ω -max Re / rho)
  std::vector<std::string> notes;
};

DecayCertificate certify_decay(const SymbolModel& model, const RadialGrid& rgrid, const SphereGrid& sgrid,
                               const std::vector<double>& tgrid);

struct RegimeDiagnostic {
  double radius;
  int direction;
  Regime regime;
  std::optional<double> certified_c;
  std::string error;
};

// Per-regime symmetrizer constants over the grid (no gluing).
std::vector<RegimeDiagnostic> regime_diagnostics(const LinearSystem& sys, const RadialGrid& rgrid,
                                                 const SphereGrid& sgrid);

struct ExpansionBranch {
  cplx leading;    // μ_l (small) or γ_l (large)
  cplx projected;  // ζ_l or β_l from the projected block
  cplx finite_difference;
  double deviation = 0.0;  // relative
};

struct AsymptoticExpansion {
  Vec omega;
  double h = 0.0;
  std::vector<ExpansionBranch> small;
  std::vector<ExpansionBranch> large;
  std::vector<cplx> nu_limits;    // Richardson limits of the non-vanishing small branches
  std::vector<cplx> L_spectrum;   // spec(L)
  double nu_deviation = 0.0;
  std::vector<cplx> large_raw_1e3;  // λ(ξ) + i|ξ|γ at |ξ| = 1e3
  std::vector<cplx> large_raw_1e4;
  std::vector<std::string> notes;

  double max_deviation() const;
};

AsymptoticExpansion expand_small(const LinearSystem& sys, const Vec& omega, double h = 1e-3);
AsymptoticExpansion expand_large(const LinearSystem& sys, const Vec& omega, double h = 1e-3);

struct SemigroupDecay {
  int dim = 1;
  std::vector<double> times;
  std::vector<double> G;
  double slope = 0.0;
  double fit_residual = 0.0;
  double lower_tail = 0.0;  // largest relative lower-tail bound in the fit window
  double upper_tail = 0.0;  // largest relative truncation indicator at |ξ| = 1e4
  std::vector<std::string> notes;
};

// G(t) = (∫ ||exp(M(ξ)t)||^2 dξ)^{1/2} on |ξ| in [1e-4, 1e4]; slope of log G
// against log(1+t) over t in [1e2, 1e4]. `sgrid` is used unless the model is isotropic.
SemigroupDecay semigroup_decay(const SymbolModel& model, const std::vector<double>& tgrid,
                               const std::optional<SphereGrid>& sgrid = std::nullopt);

// Geometric times over [t_min, t_max].
std::vector<double> geometric_times(double t_min, double t_max, int count);

}  // namespace hbl
