#include "serialize.hpp"

#include <cmath>

namespace hbl::cli {

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json grid_json(const GridInfo& g) {
  json j{{"dim", g.dim}, {"sphere_points", g.sphere_points}};
  if (g.radial_count > 0)
    j["radial"] = {{"min", g.radial_min}, {"max", g.radial_max}, {"count", g.radial_count}};
  return j;
}

json branches(const std::vector<ExpansionBranch>& bs) {
  json a = json::array();
  for (const auto& b : bs)
    a.push_back({{"leading", to_json(b.leading)},
                 {"projected", to_json(b.projected)},
                 {"finite_difference", to_json(b.finite_difference)},
                 {"relative_deviation", number(b.deviation)}});
  return a;
}

json cvec(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(to_json(z));
  return a;
}

}  // namespace

json to_json(cplx z) { return {{"re", number(z.real())}, {"im", number(z.imag())}}; }

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

json to_json(const ConditionReport& r) {
  json w = json::array();
  for (const auto& x : r.witnesses)
    w.push_back({{"point", to_json(x.point)},
                 {"eigenvalue", to_json(x.eigenvalue)},
                 {"margin", number(x.margin)},
                 {"detail", x.detail}});
  json j{{"condition", r.condition},
         {"verdict", std::string(to_string(r.verdict))},
         {"margin", number(r.margin)},
         {"witnesses", w},
         {"grid", grid_json(r.grid)},
         {"notes", r.notes}};
  if (!r.curve.empty()) {
    json c = json::array();
    for (const auto& p : r.curve) c.push_back({number(p.radius), number(p.worst_real)});
    j["worst_real_curve"] = c;
  }
  return j;
}

json to_json(const JinXinReport& r) {
  return {{"D1_2", to_json(r.d1)},
          {"D2_2", to_json(r.d2)},
          {"D3_2", to_json(r.d3)},
          {"disp2", to_json(r.disp2)},
          {"sufficient_condition_applicable", r.sufficient_applicable},
          {"sufficient_condition_consistent", r.sufficient_consistent},
          {"notes", r.notes}};
}

json to_json(const DecayCertificate& c) {
  json rates = json::array();
  for (const auto& [r, v] : c.abscissa_rate) rates.push_back({number(r), number(v)});
  return {{"pass", c.pass},
          {"c", number(c.c)},
          {"C", number(c.C)},
          {"c_inf", number(c.c_inf)},
          {"safety_factor", 0.9},
          {"small_frequency_limit", number(c.small_limit)},
          {"large_frequency_limit", number(c.large_limit)},
          {"worst_ratio", {{"xi", to_json(c.worst_xi)}, {"t", number(c.worst_t)}}},
          {"witness",
           {{"regime", std::string(to_string(c.witness.regime))},
            {"xi", to_json(c.witness.xi)},
            {"eigenvalue", to_json(c.witness.eigenvalue)},
            {"rate", number(c.witness.rate)},
            {"detail", c.witness.detail}}},
          {"grid", grid_json(c.grid)},
          {"times", c.times},
          {"abscissa_rate", rates},
          {"notes", c.notes}};
}

json to_json(const AsymptoticExpansion& e) {
  json j{{"omega", to_json(e.omega)}, {"h", e.h}, {"notes", e.notes}};
  if (!e.small.empty()) {
    j["small"] = branches(e.small);
    j["nu_limits"] = cvec(e.nu_limits);
    j["L_spectrum"] = cvec(e.L_spectrum);
    j["nu_deviation"] = number(e.nu_deviation);
  }
  if (!e.large.empty()) {
    j["large"] = branches(e.large);
    j["large_raw_1e3"] = cvec(e.large_raw_1e3);
    j["large_raw_1e4"] = cvec(e.large_raw_1e4);
  }
  return j;
}

json to_json(const DecayFit& f) {
  return {{"norm", f.norm},
          {"power_slope", number(f.power_slope)},
          {"power_residual", number(f.power_residual)},
          {"exp_rate", number(f.exp_rate)},
          {"exp_residual", number(f.exp_residual)},
          {"samples", f.samples},
          {"notes", f.notes}};
}

json to_json(const SemigroupDecay& s) {
  json curve = json::array();
  for (std::size_t i = 0; i < s.times.size(); ++i) curve.push_back({number(s.times[i]), number(s.G[i])});
  return {{"dim", s.dim},
          {"slope", number(s.slope)},
          {"expected_slope", -s.dim / 4.0},
          {"fit_residual", number(s.fit_residual)},
          {"lower_tail", number(s.lower_tail)},
          {"upper_tail", number(s.upper_tail)},
          {"G", curve},
          {"notes", s.notes}};
}

json to_json(const BlockSymmetrizerResult& s) {
  const char* st = s.status == BlockSymmetrizerResult::Status::found  ? "found"
                   : s.status == BlockSymmetrizerResult::Status::none ? "none"
                                                                      : "inconclusive";
  json j{{"status", st}, {"nullspace_dim", s.nullspace_dim}, {"min_eigenvalue", number(s.min_eigenvalue)}, {"note", s.note}};
  if (s.S) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < s.S->rows(); ++i) rows.push_back(to_json(Vec(s.S->row(i).transpose())));
    j["S"] = rows;
  }
  return j;
}

}  // namespace hbl::cli
