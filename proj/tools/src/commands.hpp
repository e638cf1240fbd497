#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hbl::cli {

struct RadialSpec {
  double min = 1e-3;
  double max = 1e3;
  int count = 61;
};

struct RunConfig {
  std::string command;
  std::optional<int> grid_sphere;
  std::optional<RadialSpec> grid_radial;
  std::optional<double> tol;
  std::filesystem::path out = ".";
  std::string format = "json";
  std::uint64_t seed = 1;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
  std::vector<double> values() const;
};

int cmd_check(const RunConfig& cfg, const std::string& input, std::ostream& out);
int cmd_certify(const RunConfig& cfg, const std::string& input, double t_max, int t_count, std::ostream& out);
int cmd_expand(const RunConfig& cfg, const std::string& input, double h, int directions, std::ostream& out);
int cmd_sweep_jinxin(const RunConfig& cfg, const Range& k1, const Range& k2, const std::optional<std::vector<double>>& K,
                     std::ostream& out);
int cmd_simulate(const RunConfig& cfg, const std::string& manifest, std::ostream& out);
int cmd_report(const RunConfig& cfg, const std::string& dir, std::ostream& out);

}  // namespace hbl::cli
