#include "commands.hpp"

#include "output.hpp"
#include "serialize.hpp"

#include <hbl/decay.hpp>
#include <hbl/dissipativity.hpp>
#include <hbl/errors.hpp>
#include <hbl/io.hpp>
#include <hbl/model.hpp>
#include <hbl/sim.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace hbl::cli {

namespace fs = std::filesystem;

namespace {

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return 0;
    case Verdict::fails:
      return 2;
    default:
      return 3;
  }
}

// fails dominates inconclusive, which dominates holds.
int combine(int a, int b) {
  if (a == 2 || b == 2) return 2;
  if (a == 3 || b == 3) return 3;
  return std::max(a, b);
}

json base_config(const RunConfig& cfg) {
  json c{{"command", cfg.command},
         {"out", cfg.out.string()},
         {"format", cfg.format},
         {"seed", cfg.seed},
         {"threads_env", std::getenv("HBL_THREADS") ? std::getenv("HBL_THREADS") : ""}};
  c["grid_sphere"] = cfg.grid_sphere ? json(*cfg.grid_sphere) : json("default");
  const RadialSpec r = cfg.grid_radial.value_or(RadialSpec{});
  c["grid_radial"] = {{"min", r.min}, {"max", r.max}, {"count", r.count}};
  c["tol"] = cfg.tol.value_or(1e-8);
  return c;
}

json envelope(const RunConfig& cfg, const json& config, const std::string& input, const std::string& hash) {
  (void)cfg;
  return {{"tool", "hbl"}, {"version", HBL_VERSION}, {"input", input}, {"input_sha256", hash}, {"config", config}};
}

void write_json(const fs::path& p, const json& j) { write_atomic(p, j.dump(2) + "\n"); }

SphereGrid sphere(const RunConfig& cfg, int dim) { return SphereGrid::make(dim, cfg.grid_sphere.value_or(0), cfg.seed); }

RadialGrid radial(const RunConfig& cfg) {
  const RadialSpec r = cfg.grid_radial.value_or(RadialSpec{});
  if (!(r.min > 0.0) || !(r.max > r.min) || r.count < 2)
    throw ValidationError("--grid-radial needs 0 < MIN < MAX and COUNT >= 2");
  return RadialGrid::make(r.min, r.max, r.count);
}

struct Loaded {
  SystemInput in;
  std::string text;
  std::string hash;
};

Loaded load(const std::string& path) {
  Loaded l;
  l.text = read_file(path);
  l.hash = sha256_hex(l.text);
  l.in = parse_system(l.text);
  return l;
}

// The system analysed by every condition check: linearization or Jin-Xin normal form.
LinearSystem analysed_system(const SystemInput& in) {
  if (in.kind == SystemInput::Kind::jinxin) return jinxin_normal_form(*in.jinxin);
  return linearize(*in.spec);
}

std::string verdict_cell(const ConditionReport& r) { return std::string(to_string(r.verdict)); }

void ensure_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw Error("output directory " + cfg.out.string() + " is not writable");
}

std::string summary_text(const std::vector<ConditionReport>& reps) {
  std::string s = "condition  verdict       margin\n";
  for (const auto& r : reps) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-13s %.6g\n", r.condition.c_str(), std::string(to_string(r.verdict)).c_str(),
                  r.margin);
    s += line;
  }
  return s;
}

void write_summary(const RunConfig& cfg, const std::vector<ConditionReport>& reps, const json& meta) {
  if (cfg.format == "csv") {
    CsvWriter w({"condition", "verdict", "margin", "witnesses"});
    for (const auto& r : reps)
      w.cell(r.condition).cell(verdict_cell(r)).cell(r.margin).cell(static_cast<long>(r.witnesses.size())).end_row();
    write_atomic(cfg.out / "summary.csv", w.str());
  } else {
    json j = meta;
    json rows = json::array();
    for (const auto& r : reps)
      rows.push_back({{"condition", r.condition}, {"verdict", verdict_cell(r)}, {"margin", r.margin}});
    j["summary"] = rows;
    write_json(cfg.out / "summary.json", j);
  }
}

}  // namespace

std::vector<double> Range::values() const {
  if (!(step > 0.0) || max < min) throw ValidationError("range needs MIN <= MAX and STEP > 0");
  const long n = static_cast<long>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> v;
  for (long i = 0; i < n; ++i) v.push_back(min + static_cast<double>(i) * step);
  return v;
}

int cmd_check(const RunConfig& cfg, const std::string& input, std::ostream& out) {
  Loaded l = load(input);
  if (l.in.kind == SystemInput::Kind::scalar_model)
    throw ValidationError("check needs a balance law or a Jin-Xin system, not a scalar symbol model");
  ensure_out(cfg);
  const int d = l.in.dim();
  const SphereGrid sg = sphere(cfg, d);
  const RadialGrid rg = radial(cfg);
  const double tol = cfg.tol.value_or(1e-8);
  json config = base_config(cfg);
  const json meta = envelope(cfg, config, input, l.hash);

  const LinearSystem sys = analysed_system(l.in);
  std::vector<ConditionReport> reps;
  reps.push_back(check_H(sys, sg));
  reps.back().condition = "H";
  reps.push_back(l.in.spec ? check_RH(*l.in.spec) : check_RH(sys));
  reps.push_back(check_K(sys, sg));
  reps.push_back(check_D1(sys, rg, sg));
  try {
    reps.push_back(check_D2(normal_form(sys), sg, tol));
  } catch (const NotTransformable& e) {
    ConditionReport r;
    r.condition = "D2";
    r.verdict = Verdict::fails;
    r.margin = 0.0;
    r.grid.dim = d;
    r.witnesses.push_back({Vec(), cplx{}, 0.0, e.what()});
    r.notes.push_back("normal form unavailable: q_v is singular");
    reps.push_back(r);
  }
  reps.push_back(check_D3(sys, sg, tol));

  int code = 0;
  for (const auto& r : reps) {
    json j = meta;
    j["report"] = to_json(r);
    write_json(cfg.out / (r.condition + ".json"), j);
    code = combine(code, exit_for(r.verdict));
  }
  const auto& d1 = reps[3];
  if (!d1.curve.empty()) {
    CsvWriter w({"radius", "worst_real"});
    for (const auto& p : d1.curve) w.cell(p.radius).cell(p.worst_real).end_row();
    write_atomic(cfg.out / "D1_curve.csv", w.str());
  }
  if (l.in.jinxin) {
    const JinXinReport jr = check_jinxin(*l.in.jinxin, rg, sg, tol);
    json j = meta;
    j["report"] = to_json(jr);
    write_json(cfg.out / "jinxin.json", j);
    out << "Jin-Xin reduced: D1_2 " << to_string(jr.d1.verdict) << ", D2_2 " << to_string(jr.d2.verdict) << ", D3_2 "
        << to_string(jr.d3.verdict) << "\n";
  }
  write_summary(cfg, reps, meta);
  out << summary_text(reps);
  return code;
}

int cmd_certify(const RunConfig& cfg, const std::string& input, double t_max, int t_count, std::ostream& out) {
  if (!(t_max > 0.0) || t_count < 2) throw ValidationError("--times needs T > 0 and COUNT >= 2");
  Loaded l = load(input);
  ensure_out(cfg);
  const int d = l.in.dim();
  const SphereGrid sg = sphere(cfg, d);
  const RadialGrid rg = radial(cfg);
  json config = base_config(cfg);
  config["times"] = {{"t_max", t_max}, {"count", t_count}};
  const json meta = envelope(cfg, config, input, l.hash);

  std::optional<LinearSystem> sys;
  SymbolModel model;
  if (l.in.kind == SystemInput::Kind::scalar_model) {
    model = SymbolModel::scalar(l.in.scalar_dim, l.in.scalar_transport);
  } else {
    sys = analysed_system(l.in);
    model = SymbolModel::from_system(*sys, l.in.name.empty() ? "system" : l.in.name);
  }
  const DecayCertificate cert = certify_decay(model, rg, sg, linear_times(t_max, t_count));

  json j = meta;
  j["certificate"] = to_json(cert);

  CsvWriter env({"radius", "direction", "t", "norm", "ratio"});
  for (const auto& e : cert.envelope)
    env.cell(e.radius).cell(static_cast<long>(e.direction)).cell(e.t).cell(e.norm).cell(e.ratio).end_row();
  write_atomic(cfg.out / "envelope.csv", env.str());

  CsvWriter ab({"radius", "rate"});
  for (const auto& [r, v] : cert.abscissa_rate) ab.cell(r).cell(v).end_row();
  write_atomic(cfg.out / "abscissa.csv", ab.str());

  if (sys) {
    LinearSystem nf = sys->in_normal_form(1e-12) ? *sys : normal_form(*sys);
    const auto diag = regime_diagnostics(nf, rg, sg);
    CsvWriter w({"radius", "direction", "regime", "certified_c", "error"});
    for (const auto& r : diag) {
      w.cell(r.radius).cell(static_cast<long>(r.direction)).cell(std::string(to_string(r.regime)));
      if (r.certified_c)
        w.cell(*r.certified_c);
      else
        w.cell(std::string());
      w.cell(r.error).end_row();
    }
    write_atomic(cfg.out / "regimes.csv", w.str());
  }
  write_json(cfg.out / "certificate.json", j);

  char line[200];
  std::snprintf(line, sizeof line, "certificate: %s  c = %.6g  C = %.6g  c_inf = %.6g\n", cert.pass ? "pass" : "fail",
                cert.c, cert.C, cert.c_inf);
  out << line;
  if (!cert.pass) out << "witness: " << to_string(cert.witness.regime) << " regime, " << cert.witness.detail << "\n";
  return cert.pass ? 0 : 2;
}

int cmd_expand(const RunConfig& cfg, const std::string& input, double h, int directions, std::ostream& out) {
  if (directions < 1) throw ValidationError("--directions must be positive");
  Loaded l = load(input);
  if (l.in.kind == SystemInput::Kind::scalar_model) throw ValidationError("expand needs a balance law or Jin-Xin system");
  ensure_out(cfg);
  const LinearSystem sys = normal_form(analysed_system(l.in));
  const int d = sys.dim();
  json config = base_config(cfg);
  config["h"] = h;
  config["directions"] = directions;
  const json meta = envelope(cfg, config, input, l.hash);

  std::vector<Vec> omegas;
  const SphereGrid sg = SphereGrid::make(d, d == 1 ? 0 : directions, cfg.seed);
  for (std::size_t i = 0; i < sg.points.size() && static_cast<int>(i) < directions; ++i) omegas.push_back(sg.points[i]);

  json results = json::array();
  CsvWriter w({"direction", "regime", "branch", "leading_re", "leading_im", "projected_re", "projected_im",
               "finite_difference_re", "finite_difference_im", "relative_deviation"});
  int code = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    json entry{{"omega", to_json(omegas[i])}};
    auto run = [&](const char* which, auto fn) {
      try {
        AsymptoticExpansion e = fn(sys, omegas[i], h);
        entry[which] = to_json(e);
        const auto& bs = std::string(which) == "small" ? e.small : e.large;
        for (std::size_t b = 0; b < bs.size(); ++b) {
          w.cell(static_cast<long>(i)).cell(std::string(which)).cell(static_cast<long>(b));
          w.cell(bs[b].leading.real()).cell(bs[b].leading.imag());
          w.cell(bs[b].projected.real()).cell(bs[b].projected.imag());
          w.cell(bs[b].finite_difference.real()).cell(bs[b].finite_difference.imag());
          w.cell(bs[b].deviation).end_row();
        }
        worst = std::max(worst, e.max_deviation());
        if (e.max_deviation() > 1e-3) code = combine(code, 3);
      } catch (const CrossingDetected& ex) {
        entry[which] = {{"error", ex.what()}, {"crossing_at", ex.location()}};
        code = combine(code, 3);
      } catch (const NotSemisimple& ex) {
        entry[which] = {{"error", ex.what()}, {"eigenvalue", to_json(ex.eigenvalue())}};
        code = combine(code, 2);
      } catch (const ConditionViolation& ex) {
        entry[which] = {{"error", ex.what()}, {"condition", ex.condition()}};
        code = combine(code, 2);
      }
    };
    run("small", [](const LinearSystem& s, const Vec& w0, double hh) { return expand_small(s, w0, hh); });
    run("large", [](const LinearSystem& s, const Vec& w0, double hh) { return expand_large(s, w0, hh); });
    results.push_back(entry);
  }
  json j = meta;
  j["expansions"] = results;
  j["max_relative_deviation"] = worst;
  write_json(cfg.out / "expansion.json", j);
  write_atomic(cfg.out / "expansion.csv", w.str());
  char line[120];
  std::snprintf(line, sizeof line, "expansions over %zu directions, max relative deviation %.3g\n", omegas.size(), worst);
  out << line;
  return code;
}

int cmd_sweep_jinxin(const RunConfig& cfg, const Range& k1, const Range& k2, const std::optional<std::vector<double>>& K,
                     std::ostream& out) {
  Mat Km(2, 2);
  if (K) {
    if (K->size() != 4) throw ValidationError("--K expects four numbers (row-major 2x2)");
    Km << (*K)[0], (*K)[1], (*K)[2], (*K)[3];
  } else {
    Km << 1, -1, -1, 1;
  }
  ensure_out(cfg);
  const auto v1 = k1.values(), v2 = k2.values();
  const SphereGrid sg = sphere(cfg, 1);
  const RadialGrid rg = radial(cfg);
  const double tol = cfg.tol.value_or(1e-8);
  json config = base_config(cfg);
  config["kappa1"] = {k1.min, k1.max, k1.step};
  config["kappa2"] = {k2.min, k2.max, k2.step};
  config["K"] = {{Km(0, 0), Km(0, 1)}, {Km(1, 0), Km(1, 1)}};
  std::string key;
  for (double x : {Km(0, 0), Km(0, 1), Km(1, 0), Km(1, 1)}) key += num(x) + ",";

  CsvWriter w({"kappa1", "kappa2", "D1", "D2", "D3"});
  std::map<std::string, int> counts;
  for (double a : v1)
    for (double b : v2) {
      JinXinSpec jx;
      jx.dim = 1;
      jx.m = 2;
      Mat B = Mat::Zero(2, 2);
      B(0, 0) = a;
      B(1, 1) = b;
      jx.b = {B};
      jx.flux_jac = {Km};
      const JinXinReport r = check_jinxin(jx, rg, sg, tol);
      w.cell(a).cell(b).cell(verdict_cell(r.d1)).cell(verdict_cell(r.d2)).cell(verdict_cell(r.d3)).end_row();
      ++counts[verdict_cell(r.d1) + "/" + verdict_cell(r.d2) + "/" + verdict_cell(r.d3)];
    }
  write_atomic(cfg.out / "sweep.csv", w.str());
  json j = envelope(cfg, config, "sweep", sha256_hex(key));
  j["points"] = v1.size() * v2.size();
  j["verdict_counts"] = counts;
  write_json(cfg.out / "sweep.json", j);
  out << "swept " << v1.size() * v2.size() << " points\n";
  for (const auto& [k, c] : counts) out << "  " << k << ": " << c << "\n";
  return 0;
}

namespace {

// Strict reader for run manifests.
class ManifestReader {
 public:
  ManifestReader(std::string path, const std::string& text) : path_(std::move(path)), text_(text) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    const auto [l, c] = locate_pointer(text_, ptr);
    throw ParseError(msg + " (at " + (ptr.empty() ? "/" : ptr) + ")", l, c, ptr);
  }
  void keys(const json& o, const std::string& ptr, std::set<std::string> ok) const {
    if (!o.is_object()) fail(ptr, "expected an object");
    for (auto it = o.begin(); it != o.end(); ++it)
      if (!ok.count(it.key())) fail(ptr + "/" + it.key(), "unknown key '" + it.key() + "'");
  }
  const json& need(const json& o, const std::string& ptr, const std::string& k) const {
    if (!o.contains(k)) fail(ptr, "missing key '" + k + "'");
    return o[k];
  }
  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr, "non-finite number");
    return x;
  }
  long integer(const json& v, const std::string& ptr, long lo, long hi) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi) fail(ptr, "integer out of range");
    return x;
  }
  std::vector<double> numbers(const json& v, const std::string& ptr) const {
    if (!v.is_array()) fail(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
    return out;
  }
  bool boolean(const json& v, const std::string& ptr) const {
    if (!v.is_boolean()) fail(ptr, "expected a boolean");
    return v.get<bool>();
  }

 private:
  std::string path_;
  const std::string& text_;
};

long flat_mode(const PeriodicGrid& g, const std::vector<int>& k) {
  long flat = 0;
  for (int a = 0; a < g.dim; ++a) {
    int i = k[a] < 0 ? k[a] + g.N : k[a];
    if (i < 0 || i >= g.N) throw ValidationError("mode index outside the grid");
    flat = flat * g.N + i;
  }
  return flat;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const std::string& manifest, std::ostream& out) {
  const std::string text = read_file(manifest);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [l, c] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("malformed JSON: ") + e.what(), l, c);
  }
  ManifestReader rd(manifest, text);
  rd.keys(doc, "", {"system", "mode", "grid", "dt", "steps", "T", "init", "outputs"});

  std::string sys_text, sys_name;
  const json& sj = rd.need(doc, "", "system");
  if (sj.is_string()) {
    fs::path p = sj.get<std::string>();
    if (p.is_relative()) p = fs::path(manifest).parent_path() / p;
    sys_name = p.string();
    sys_text = read_file(sys_name);
  } else if (sj.is_object()) {
    sys_name = manifest + "#/system";
    sys_text = sj.dump();
  } else {
    rd.fail("/system", "expected a path or an inline system object");
  }
  SystemInput in;
  try {
    in = parse_system(sys_text);
  } catch (const ParseError& e) {
    if (sj.is_string()) throw ParseError(sys_name + ": " + e.what(), e.line(), e.column(), e.pointer());
    const auto [l, c] = locate_pointer(text, "/system");
    throw ParseError(std::string("inline system: ") + e.what(), l, c, "/system");
  }
  if (in.kind == SystemInput::Kind::scalar_model) rd.fail("/system", "simulate needs a balance law or Jin-Xin system");

  std::string mode = in.kind == SystemInput::Kind::jinxin ? "jinxin" : "linear";
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) rd.fail("/mode", "expected a string");
    mode = doc["mode"].get<std::string>();
    if (mode != "linear" && mode != "jinxin") rd.fail("/mode", "mode must be 'linear' or 'jinxin'");
  }
  if (mode == "jinxin" && in.kind != SystemInput::Kind::jinxin) rd.fail("/mode", "jinxin mode needs a Jin-Xin system");

  const json& gj = rd.need(doc, "", "grid");
  rd.keys(gj, "/grid", {"N", "L"});
  const int d = in.dim();
  const PeriodicGrid grid = PeriodicGrid::make(d, static_cast<int>(rd.integer(rd.need(gj, "/grid", "N"), "/grid/N", 1, 4096)),
                                               rd.number(rd.need(gj, "/grid", "L"), "/grid/L"));
  const double T = rd.number(rd.need(doc, "", "T"), "/T");
  if (!(T > 0.0)) rd.fail("/T", "T must be positive");

  const LinearSystem sys = in.kind == SystemInput::Kind::jinxin ? linearize(build_jinxin(*in.jinxin)) : linearize(*in.spec);
  const int n = sys.n();

  const json& ij = rd.need(doc, "", "init");
  rd.keys(ij, "/init", {"kind", "amplitude", "width", "center", "seed", "kmax", "k"});
  const json& kj = rd.need(ij, "/init", "kind");
  if (!kj.is_string()) rd.fail("/init/kind", "expected a string");
  const std::string kind = kj.get<std::string>();
  Vec amp = Vec::Constant(n, 1.0);
  if (ij.contains("amplitude")) {
    if (ij["amplitude"].is_number()) {
      amp.setConstant(rd.number(ij["amplitude"], "/init/amplitude"));
    } else {
      const auto a = rd.numbers(ij["amplitude"], "/init/amplitude");
      if (static_cast<int>(a.size()) != n) rd.fail("/init/amplitude", "expected " + std::to_string(n) + " amplitudes");
      amp = Eigen::Map<const Vec>(a.data(), n);
    }
  }
  RField U0;
  if (kind == "gaussian") {
    const double width = ij.contains("width") ? rd.number(ij["width"], "/init/width") : 1.0;
    std::optional<Vec> center;
    if (ij.contains("center")) {
      const auto c = rd.numbers(ij["center"], "/init/center");
      if (static_cast<int>(c.size()) != d) rd.fail("/init/center", "center must have one entry per dimension");
      center = Eigen::Map<const Vec>(c.data(), d);
    }
    U0 = gaussian_data(grid, amp, width, center);
  } else if (kind == "noise") {
    const auto seed = ij.contains("seed") ? rd.integer(ij["seed"], "/init/seed", 0, (1L << 53)) : static_cast<long>(cfg.seed);
    const int kmax = ij.contains("kmax") ? static_cast<int>(rd.integer(ij["kmax"], "/init/kmax", 1, grid.N / 2)) : 8;
    U0 = noise_data(grid, amp, static_cast<std::uint64_t>(seed), kmax);
  } else if (kind == "mode") {
    const auto kv = rd.numbers(rd.need(ij, "/init", "k"), "/init/k");
    if (static_cast<int>(kv.size()) != d) rd.fail("/init/k", "k must have one entry per dimension");
    std::vector<int> k;
    for (double x : kv) k.push_back(static_cast<int>(std::lround(x)));
    U0 = mode_data(grid, amp, k);
  } else {
    rd.fail("/init/kind", "kind must be 'gaussian', 'noise' or 'mode'");
  }

  SimOptions opt;
  bool snapshot = false;
  std::optional<std::pair<double, double>> window;
  std::vector<std::vector<int>> mode_list;
  if (doc.contains("outputs")) {
    const json& oj = doc["outputs"];
    rd.keys(oj, "/outputs", {"times", "geometric", "sobolev", "snapshot", "modes", "window", "dealias"});
    if (oj.contains("times")) opt.output_times = rd.numbers(oj["times"], "/outputs/times");
    if (oj.contains("geometric")) {
      const json& g = oj["geometric"];
      rd.keys(g, "/outputs/geometric", {"t_min", "count"});
      const double t0 = rd.number(rd.need(g, "/outputs/geometric", "t_min"), "/outputs/geometric/t_min");
      const int c = static_cast<int>(rd.integer(rd.need(g, "/outputs/geometric", "count"), "/outputs/geometric/count", 2, 100000));
      if (!(t0 > 0.0) || t0 >= T) rd.fail("/outputs/geometric/t_min", "t_min must lie in (0, T)");
      for (double t : geometric_times(t0, T, c)) opt.output_times.push_back(t);
    }
    if (oj.contains("sobolev")) opt.sobolev = rd.numbers(oj["sobolev"], "/outputs/sobolev");
    if (oj.contains("snapshot")) snapshot = rd.boolean(oj["snapshot"], "/outputs/snapshot");
    if (oj.contains("dealias")) opt.dealias = rd.boolean(oj["dealias"], "/outputs/dealias");
    if (oj.contains("window")) {
      const auto w = rd.numbers(oj["window"], "/outputs/window");
      if (w.size() != 2 || !(w[0] < w[1])) rd.fail("/outputs/window", "window must be [t0, t1] with t0 < t1");
      window = {w[0], w[1]};
    }
    if (oj.contains("modes")) {
      const json& mj = oj["modes"];
      if (!mj.is_array()) rd.fail("/outputs/modes", "expected an array of wavenumber vectors");
      for (std::size_t i = 0; i < mj.size(); ++i) {
        const std::string p = "/outputs/modes/" + std::to_string(i);
        const auto kv = rd.numbers(mj[i], p);
        if (static_cast<int>(kv.size()) != d) rd.fail(p, "mode must have one entry per dimension");
        std::vector<int> k;
        for (double x : kv) k.push_back(static_cast<int>(std::lround(x)));
        mode_list.push_back(k);
      }
    }
  }
  if (mode_list.empty())
    for (int j = 1; j <= 8 && j < grid.N / 2; ++j) {
      std::vector<int> k(d, 0);
      k[0] = j;
      mode_list.push_back(k);
    }
  for (const auto& k : mode_list) opt.track_modes.push_back(flat_mode(grid, k));
  if (!opt.output_times.empty()) {
    opt.output_times.push_back(0.0);
    std::sort(opt.output_times.begin(), opt.output_times.end());
    opt.output_times.erase(std::unique(opt.output_times.begin(), opt.output_times.end()), opt.output_times.end());
    for (double t : opt.output_times)
      if (t < 0.0 || t > T) rd.fail("/outputs/times", "output times must lie in [0, T]");
  }

  ensure_out(cfg);
  json config = base_config(cfg);
  config["manifest"] = doc;
  config["mode"] = mode;
  const json meta = envelope(cfg, config, manifest, sha256_hex(text + sys_text));

  SimResult res;
  if (mode == "linear") {
    long steps = 200;
    if (doc.contains("steps")) steps = rd.integer(doc["steps"], "/steps", 1, 100000000);
    else if (doc.contains("dt")) {
      const double dt = rd.number(doc["dt"], "/dt");
      if (!(dt > 0.0)) rd.fail("/dt", "dt must be positive");
      steps = std::max<long>(1, std::lround(std::ceil(T / dt - 1e-9)));
    }
    res = simulate_linear(sys, grid, U0, T, steps, opt);
  } else {
    double dt = jinxin_default_dt(*in.jinxin, grid);
    if (doc.contains("dt")) dt = rd.number(doc["dt"], "/dt");
    res = simulate_jinxin(*in.jinxin, grid, U0, T, dt, opt);  // CflViolation propagates
  }

  CsvWriter ts([&] {
    std::vector<std::string> h{"t", "L2", "Linf"};
    for (const auto& [s, v] : res.sobolev) {
      char name[32];
      std::snprintf(name, sizeof name, "H%g", s);
      h.push_back(name);
    }
    return h;
  }());
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    ts.cell(res.times[i]).cell(res.l2[i]).cell(res.linf[i]);
    for (const auto& [s, v] : res.sobolev) ts.cell(v[i]);
    ts.end_row();
  }
  write_atomic(cfg.out / "timeseries.csv", ts.str());

  CsvWriter mw({"t", "mode", "wavenumber_norm", "component", "re", "im"});
  for (const auto& s : res.modes)
    for (Eigen::Index c = 0; c < s.value.size(); ++c)
      mw.cell(s.t).cell(s.mode).cell(grid.xi(s.mode).norm()).cell(static_cast<long>(c)).cell(s.value[c].real())
          .cell(s.value[c].imag()).end_row();
  write_atomic(cfg.out / "modes.csv", mw.str());

  json j = meta;
  j["integrator"] = {{"dt", res.dt}, {"steps", res.steps}, {"dealias", res.dealias}, {"aborted", res.aborted},
                     {"note", res.note}, {"final_time", res.final_time}};
  int code = res.aborted ? 3 : 0;
  if (res.times.size() >= 2) {
    const double t0 = window ? window->first : res.times[res.times.size() / 2];
    const double t1 = window ? window->second : res.times.back();
    json fits = json::array();
    for (const auto& f : measure_decay(res, t0, t1)) fits.push_back(to_json(f));
    j["fits"] = fits;
    j["window"] = {t0, t1};
  }

  if (mode == "linear") {
    const SymbolModel model = SymbolModel::from_system(sys);
    const DecayCertificate cert =
        certify_decay(model, RadialGrid::make(), SphereGrid::make(d), linear_times(std::max(50.0, T), 40));
    std::map<long, double> initial;
    for (const auto& s : res.modes)
      if (s.t == 0.0) initial[s.mode] = s.value.norm();
    CsvWriter ew({"t", "mode", "wavenumber_norm", "amplitude", "bound", "within"});
    bool all_ok = true;
    for (const auto& s : res.modes) {
      const double r = grid.xi(s.mode).norm();
      const double a0 = initial.count(s.mode) ? initial[s.mode] : std::numeric_limits<double>::quiet_NaN();
      const double bound = cert.C * std::exp(-cert.c * rho(r) * s.t) * a0;
      const bool ok = !(s.value.norm() > bound * (1.0 + 1e-9) + 1e-300);
      all_ok = all_ok && ok;
      ew.cell(s.t).cell(s.mode).cell(r).cell(s.value.norm()).cell(bound).cell(std::string(ok ? "yes" : "no")).end_row();
    }
    write_atomic(cfg.out / "envelope.csv", ew.str());
    j["envelope_check"] = {{"c", cert.c}, {"C", cert.C}, {"certificate_pass", cert.pass}, {"all_within", all_ok}};
    if (!cert.pass || !all_ok) code = combine(code, 2);
  }
  if (snapshot) write_snapshot((cfg.out / "final.hbl").string(), grid, res.final_state, res.final_time);
  write_json(cfg.out / "exponents.json", j);

  char line[160];
  std::snprintf(line, sizeof line, "simulated %s to t = %g in %ld steps (dt = %.6g)%s\n", mode.c_str(), res.final_time,
                res.steps, res.dt, res.aborted ? ", aborted" : "");
  out << line;
  return code;
}

int cmd_report(const RunConfig& cfg, const std::string& dir, std::ostream& out) {
  if (!fs::is_directory(dir)) throw ValidationError(dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  json rows = json::array();
  CsvWriter w({"file", "item", "verdict", "margin"});
  int code = 0;
  for (const auto& f : files) {
    const std::string text = read_file(f.string());
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      const auto [l, c] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
      throw ParseError(f.string() + ": malformed JSON", l, c);
    }
    auto add = [&](const std::string& item, const std::string& verdict, double margin) {
      rows.push_back({{"file", f.filename().string()}, {"item", item}, {"verdict", verdict}, {"margin", margin}});
      w.cell(f.filename().string()).cell(item).cell(verdict).cell(margin).end_row();
      if (verdict == "fails" || verdict == "fail") code = combine(code, 2);
      if (verdict == "inconclusive") code = combine(code, 3);
    };
    auto margin_of = [](const json& r) { return r.contains("margin") && r["margin"].is_number() ? r["margin"].get<double>() : NAN; };
    if (j.contains("report") && j["report"].contains("verdict")) {
      add(j["report"]["condition"].get<std::string>(), j["report"]["verdict"].get<std::string>(), margin_of(j["report"]));
    } else if (j.contains("report") && j["report"].contains("D1_2")) {
      for (const char* k : {"D1_2", "D2_2", "D3_2", "disp2"})
        add(k, j["report"][k]["verdict"].get<std::string>(), margin_of(j["report"][k]));
    } else if (j.contains("certificate")) {
      const auto& c = j["certificate"];
      add("certificate", c["pass"].get<bool>() ? "pass" : "fail", c["c"].is_number() ? c["c"].get<double>() : NAN);
    }
  }
  ensure_out(cfg);
  if (cfg.format == "csv") {
    write_atomic(cfg.out / "report.csv", w.str());
  } else {
    json j{{"tool", "hbl"}, {"version", HBL_VERSION}, {"directory", dir}, {"config", base_config(cfg)}, {"items", rows}};
    write_json(cfg.out / "report.json", j);
  }
  for (const auto& r : rows) {
    char line[200];
    std::snprintf(line, sizeof line, "%-24s %-12s %-13s %.6g\n", r["file"].get<std::string>().c_str(),
                  r["item"].get<std::string>().c_str(), r["verdict"].get<std::string>().c_str(),
                  r["margin"].is_number() ? r["margin"].get<double>() : NAN);
    out << line;
  }
  return code;
}

}  // namespace hbl::cli
