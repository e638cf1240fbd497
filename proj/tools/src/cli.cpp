#include "hbl_cli/cli.hpp"

#include "commands.hpp"

#include <hbl/errors.hpp>
#include <hbl/io.hpp>

#include <CLI11.hpp>

#include <algorithm>

namespace hbl::cli {

namespace {

void add_global(CLI::App& app, RunConfig& cfg, std::vector<double>& radial, int& sphere, double& tol) {
  app.add_option("--grid-sphere", sphere, "Points on the direction sphere (d >= 2)")->check(CLI::PositiveNumber);
  app.add_option("--grid-radial", radial, "Radial grid MIN MAX COUNT")->expected(3);
  app.add_option("--tol", tol, "Stability tolerance for the compatibility checks")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--format", cfg.format, "Summary format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", cfg.seed, "Seed for randomized grids and data");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dissipativity checks, decay certificates and simulations for hyperbolic balance laws", "hbl"};
  app.set_version_flag("--version", std::string(HBL_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::vector<double> radial;
  int sphere = 0;
  double tol = 0.0;
  add_global(app, cfg, radial, sphere, tol);

  std::string input;
  auto* check = app.add_subcommand("check", "Evaluate H, RH, K, D1, D2 and D3");
  check->add_option("system", input, "System file")->required();

  auto* certify = app.add_subcommand("certify", "Certify the decay estimate with constants (C, c)");
  certify->add_option("system", input, "System file")->required();
  std::vector<double> times{50.0, 40.0};
  certify->add_option("--times", times, "T COUNT: times linearly spaced over [0, T]")->expected(2);

  auto* expand = app.add_subcommand("expand", "Compare projected-block and finite-difference expansions");
  expand->add_option("system", input, "System file")->required();
  double h = 1e-3;
  int directions = 4;
  expand->add_option("--step", h, "Finite-difference step h")->check(CLI::PositiveNumber);
  expand->add_option("--directions", directions, "Number of directions")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep-jinxin", "Sweep the 1-D, m = 2 Jin-Xin family over b = diag(k1, k2)");
  std::vector<double> k1{0.5, 9.0, 0.25}, k2{0.5, 9.0, 0.25}, K;
  sweep->add_option("--kappa1", k1, "MIN MAX STEP")->expected(3);
  sweep->add_option("--kappa2", k2, "MIN MAX STEP")->expected(3);
  sweep->add_option("--K", K, "Flux Jacobian, four numbers row-major")->expected(4);

  auto* simulate = app.add_subcommand("simulate", "Run a simulation from a manifest");
  simulate->add_option("manifest", input, "Run manifest")->required();

  auto* report = app.add_subcommand("report", "Aggregate the JSON reports in a directory");
  report->add_option("dir", input, "Directory with reports")->required();

  for (auto* sub : {check, certify, expand, sweep, simulate, report}) sub->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << HBL_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "hbl: " << e.what() << "\n";
    return kParseError;
  }

  if (sphere > 0) cfg.grid_sphere = sphere;
  if (tol > 0.0) cfg.tol = tol;
  if (!radial.empty()) cfg.grid_radial = RadialSpec{radial[0], radial[1], static_cast<int>(radial[2])};

  try {
    if (*check) {
      cfg.command = "check";
      return cmd_check(cfg, input, out);
    }
    if (*certify) {
      cfg.command = "certify";
      return cmd_certify(cfg, input, times[0], static_cast<int>(times[1]), out);
    }
    if (*expand) {
      cfg.command = "expand";
      return cmd_expand(cfg, input, h, directions, out);
    }
    if (*sweep) {
      cfg.command = "sweep-jinxin";
      std::optional<std::vector<double>> Kopt;
      if (!K.empty()) Kopt = K;
      return cmd_sweep_jinxin(cfg, {k1[0], k1[1], k1[2]}, {k2[0], k2[1], k2[2]}, Kopt, out);
    }
    if (*simulate) {
      cfg.command = "simulate";
      return cmd_simulate(cfg, input, out);
    }
    cfg.command = "report";
    return cmd_report(cfg, input, out);
  } catch (const ParseError& e) {
    err << input << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kParseError;
  } catch (const CflViolation& e) {
    err << "hbl: " << e.what() << "\n";
    return kFails;
  } catch (const ConditionViolation& e) {
    err << "hbl: " << e.what() << "\n";
    return kFails;
  } catch (const RegimeBoundary& e) {
    err << "hbl: " << e.what() << "\n";
    return kInconclusive;
  } catch (const QuadratureError& e) {
    err << "hbl: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    err << "hbl: " << e.what() << "\n";
    return kParseError;
  }
}

}  // namespace hbl::cli
