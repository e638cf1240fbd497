#include "hbl/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hbl {

using json = nlohmann::json;

int SystemInput::dim() const {
  switch (kind) {
    case Kind::balance_law:
      return spec->dim;
    case Kind::jinxin:
      return jinxin->dim;
    case Kind::scalar_model:
      return scalar_dim;
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

namespace {

void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
}

void skip_string(const std::string& s, std::size_t& i) {
  ++i;
  while (i < s.size() && s[i] != '"') i += s[i] == '\\' ? 2 : 1;
  ++i;
}

void skip_value(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i >= s.size()) return;
  if (s[i] == '"') {
    skip_string(s, i);
    return;
  }
  if (s[i] == '{' || s[i] == '[') {
    int depth = 0;
    while (i < s.size()) {
      if (s[i] == '"') {
        skip_string(s, i);
        continue;
      }
      if (s[i] == '{' || s[i] == '[') ++depth;
      if (s[i] == '}' || s[i] == ']') {
        --depth;
        if (depth == 0) {
          ++i;
          return;
        }
      }
      ++i;
    }
    return;
  }
  while (i < s.size() && s[i] != ',' && s[i] != '}' && s[i] != ']') ++i;
}

std::string unescape_token(const std::string& tok) {
  std::string out;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    if (tok[i] == '~' && i + 1 < tok.size()) {
      out += tok[i + 1] == '1' ? '/' : '~';
      ++i;
    } else {
      out += tok[i];
    }
  }
  return out;
}

}  // namespace

std::pair<int, int> locate_pointer(const std::string& text, const std::string& pointer) {
  std::vector<std::string> tokens;
  std::size_t p = 1;
  while (p <= pointer.size() && !pointer.empty()) {
    const std::size_t q = pointer.find('/', p);
    tokens.push_back(unescape_token(pointer.substr(p, q == std::string::npos ? std::string::npos : q - p)));
    if (q == std::string::npos) break;
    p = q + 1;
  }
  std::size_t i = 0;
  skip_ws(text, i);
  for (const auto& tok : tokens) {
    if (i >= text.size()) break;
    if (text[i] == '{') {
      ++i;
      bool found = false;
      while (i < text.size()) {
        skip_ws(text, i);
        if (i >= text.size() || text[i] != '"') break;
        const std::size_t start = i;
        skip_string(text, i);
        const std::string key = text.substr(start + 1, i - start - 2);
        skip_ws(text, i);
        if (i < text.size() && text[i] == ':') ++i;
        skip_ws(text, i);
        if (key == tok) {
          found = true;
          break;
        }
        skip_value(text, i);
        skip_ws(text, i);
        if (i < text.size() && text[i] == ',') ++i;
      }
      if (!found) break;
    } else if (text[i] == '[') {
      ++i;
      long idx = 0;
      try {
        idx = std::stol(tok);
      } catch (...) {
        break;
      }
      for (long k = 0; k < idx && i < text.size(); ++k) {
        skip_value(text, i);
        skip_ws(text, i);
        if (i < text.size() && text[i] == ',') ++i;
      }
      skip_ws(text, i);
    } else {
      break;
    }
  }
  return line_column(text, i);
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    const auto [l, c] = locate_pointer(text_, ptr);
    throw ParseError(msg + " (at " + (ptr.empty() ? "/" : ptr) + ")", l, c, ptr);
  }

  void keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    std::set<std::string> ok;
    for (auto* a : allowed) ok.insert(a);
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!ok.count(it.key())) fail(ptr + "/" + it.key(), "unknown key '" + it.key() + "'");
  }

  const json& need(const json& obj, const std::string& ptr, const char* key) const {
    if (!obj.contains(key)) fail(ptr, std::string("missing key '") + key + "'");
    return obj.at(key);
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr, "non-finite number");
    return x;
  }

  int integer(const json& v, const std::string& ptr, int lo, int hi) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) fail(ptr, "integer out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  Vec vector(const json& v, const std::string& ptr, int n) const {
    if (!v.is_array() || static_cast<int>(v.size()) != n) fail(ptr, "expected an array of " + std::to_string(n) + " numbers");
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = number(v[i], ptr + "/" + std::to_string(i));
    return out;
  }

  // Nested rows or a flat row-major array; a bare number is accepted for 1 x 1.
  Mat matrix(const json& v, const std::string& ptr, int rows, int cols) const {
    Mat M(rows, cols);
    if (v.is_number() && rows == 1 && cols == 1) {
      M(0, 0) = number(v, ptr);
      return M;
    }
    if (!v.is_array()) fail(ptr, "expected a matrix");
    if (!v.empty() && v[0].is_array()) {
      if (static_cast<int>(v.size()) != rows)
        fail(ptr, "expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
      for (int i = 0; i < rows; ++i) {
        const std::string rp = ptr + "/" + std::to_string(i);
        if (!v[i].is_array() || static_cast<int>(v[i].size()) != cols)
          fail(rp, "row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
        for (int j = 0; j < cols; ++j) M(i, j) = number(v[i][j], rp + "/" + std::to_string(j));
      }
      return M;
    }
    if (static_cast<int>(v.size()) != rows * cols)
      fail(ptr, "flat matrix must have " + std::to_string(rows * cols) + " entries");
    for (int k = 0; k < rows * cols; ++k) M(k / cols, k % cols) = number(v[k], ptr + "/" + std::to_string(k));
    return M;
  }

  bool looks_like_matrix(const json& v, int n) const {
    if (!v.is_array() || static_cast<int>(v.size()) != n) return false;
    for (const auto& row : v)
      if (!row.is_array() || row.empty() || !row[0].is_number()) return false;
    return true;
  }

  std::vector<Mat> matrices(const json& v, const std::string& ptr, int count, int n) const {
    if (count == 1 && looks_like_matrix(v, n) && !(n == 1 && v[0].size() != 1)) return {matrix(v, ptr, n, n)};
    if (!v.is_array() || static_cast<int>(v.size()) != count)
      fail(ptr, "expected " + std::to_string(count) + " matrices (one per dimension)");
    std::vector<Mat> out;
    for (int j = 0; j < count; ++j) out.push_back(matrix(v[j], ptr + "/" + std::to_string(j), n, n));
    return out;
  }

  std::vector<PolyMap> polys(const json& v, const std::string& ptr, int count, int n) const {
    if (!v.is_array() || static_cast<int>(v.size()) != count)
      fail(ptr, "flux_poly must list " + std::to_string(count) + " maps (one per dimension)");
    std::vector<PolyMap> out;
    for (int j = 0; j < count; ++j) {
      const std::string jp = ptr + "/" + std::to_string(j);
      if (!v[j].is_array()) fail(jp, "expected an array of monomials");
      std::vector<std::vector<Monomial>> terms(n);
      for (std::size_t t = 0; t < v[j].size(); ++t) {
        const std::string tp = jp + "/" + std::to_string(t);
        const json& term = v[j][t];
        keys(term, tp, {"component", "coeff", "powers"});
        const int comp = integer(need(term, tp, "component"), tp + "/component", 0, n - 1);
        Monomial mono;
        mono.coeff = number(need(term, tp, "coeff"), tp + "/coeff");
        const json& pw = need(term, tp, "powers");
        if (!pw.is_array() || static_cast<int>(pw.size()) != n)
          fail(tp + "/powers", "powers must have " + std::to_string(n) + " entries");
        for (int i = 0; i < n; ++i)
          mono.powers.push_back(integer(pw[i], tp + "/powers/" + std::to_string(i), 0, PolyMap::kMaxDegree));
        terms[comp].push_back(mono);
      }
      try {
        out.emplace_back(n, terms);
      } catch (const ValidationError& e) {
        fail(jp, e.what());
      }
    }
    return out;
  }

 private:
  const std::string& text_;
};

}  // namespace

SystemInput parse_system(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [l, c] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("malformed JSON: ") + e.what(), l, c);
  }
  Reader rd(text);
  SystemInput in;
  if (!doc.is_object()) rd.fail("", "system file must be a JSON object");
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) rd.fail("/name", "expected a string");
    in.name = doc["name"].get<std::string>();
  }

  if (doc.contains("jinxin")) {
    rd.keys(doc, "", {"name", "jinxin"});
    const json& j = doc["jinxin"];
    const std::string p = "/jinxin";
    rd.keys(j, p, {"dim", "m", "eps", "b", "K", "flux_poly"});
    JinXinSpec jx;
    jx.dim = rd.integer(rd.need(j, p, "dim"), p + "/dim", 1, 3);
    jx.m = rd.integer(rd.need(j, p, "m"), p + "/m", 1, 32);
    if (j.contains("eps")) jx.eps = rd.number(j["eps"], p + "/eps");
    jx.b = rd.matrices(rd.need(j, p, "b"), p + "/b", jx.dim, jx.m);
    if (j.contains("flux_poly")) jx.flux_poly = rd.polys(j["flux_poly"], p + "/flux_poly", jx.dim, jx.m);
    if (j.contains("K")) {
      jx.flux_jac = rd.matrices(j["K"], p + "/K", jx.dim, jx.m);
    } else if (jx.flux_poly) {
      for (const auto& f : *jx.flux_poly) jx.flux_jac.push_back(f.jacobian(Vec::Zero(jx.m)));
    } else {
      rd.fail(p, "missing key 'K' (or 'flux_poly')");
    }
    try {
      jx.validate();
    } catch (const ValidationError& e) {
      rd.fail(p, e.what());
    }
    in.kind = SystemInput::Kind::jinxin;
    in.jinxin = std::move(jx);
    return in;
  }

  if (doc.contains("scalar_model")) {
    rd.keys(doc, "", {"name", "scalar_model"});
    const json& s = doc["scalar_model"];
    rd.keys(s, "/scalar_model", {"dim", "transport"});
    in.kind = SystemInput::Kind::scalar_model;
    in.scalar_dim = rd.integer(rd.need(s, "/scalar_model", "dim"), "/scalar_model/dim", 1, 3);
    if (s.contains("transport")) {
      if (!s["transport"].is_boolean()) rd.fail("/scalar_model/transport", "expected a boolean");
      in.scalar_transport = s["transport"].get<bool>();
    }
    return in;
  }

  rd.keys(doc, "", {"name", "dim", "n", "m", "equilibrium", "A", "DQ", "flux_poly"});
  BalanceLawSpec spec;
  spec.dim = rd.integer(rd.need(doc, "", "dim"), "/dim", 1, 3);
  spec.n = rd.integer(rd.need(doc, "", "n"), "/n", 2, 128);
  spec.m = rd.integer(rd.need(doc, "", "m"), "/m", 1, spec.n - 1);
  spec.equilibrium = doc.contains("equilibrium") ? rd.vector(doc["equilibrium"], "/equilibrium", spec.n)
                                                 : Vec::Zero(spec.n);
  spec.flux_jacobians = rd.matrices(rd.need(doc, "", "A"), "/A", spec.dim, spec.n);
  spec.source_jacobian = rd.matrix(rd.need(doc, "", "DQ"), "/DQ", spec.n, spec.n);
  if (doc.contains("flux_poly")) spec.flux_poly = rd.polys(doc["flux_poly"], "/flux_poly", spec.dim, spec.n);
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    rd.fail(spec.source_jacobian.topRows(spec.m).cwiseAbs().maxCoeff() != 0.0 ? "/DQ" : "", e.what());
  }
  in.kind = SystemInput::Kind::balance_law;
  in.spec = std::move(spec);
  return in;
}

SystemInput load_system(const std::string& path) { return parse_system(read_file(path)); }

}  // namespace hbl
