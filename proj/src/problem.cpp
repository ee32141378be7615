#include "quadfock/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <regex>
#include <sstream>

namespace qf {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Symbol: return "symbol";
    case Mode::Supersymmetric: return "supersymmetric";
    case Mode::NormalForm: return "normal-form";
  }
  return "?";
}

namespace {

std::string join_errors(const std::vector<FieldError>& errors) {
  std::ostringstream os;
  os << errors.size() << " validation error(s)";
  for (const auto& e : errors) os << "\n  " << e.path << ": " << e.message;
  return os.str();
}

const char* payload_key(Mode m) {
  switch (m) {
    case Mode::Symbol: return "symbol";
    case Mode::Supersymmetric: return "supersymmetric";
    case Mode::NormalForm: return "normal_form";
  }
  return "?";
}

class Reader {
 public:
  std::vector<FieldError> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

  std::optional<cplx> complex_at(const Json& v, const std::string& path) {
    if (v.is_number()) return cplx(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return cplx(v[0].get<double>(), v[1].get<double>());
    fail(path, "expected a number or a [re, im] pair");
    return std::nullopt;
  }

  std::optional<CMatrix> cmatrix(const Json& v, const std::string& path, int rows, int cols) {
    if (!v.is_array() || static_cast<int>(v.size()) != rows) {
      std::ostringstream os;
      os << "expected an array of " << rows << " rows";
      fail(path, os.str());
      return std::nullopt;
    }
    CMatrix a(rows, cols);
    bool ok = true;
    for (int i = 0; i < rows; ++i) {
      const std::string rp = path + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || static_cast<int>(v[i].size()) != cols) {
        std::ostringstream os;
        os << "expected a row of " << cols << " entries";
        fail(rp, os.str());
        ok = false;
        continue;
      }
      for (int j = 0; j < cols; ++j) {
        const auto z = complex_at(v[i][j], rp + "[" + std::to_string(j) + "]");
        if (!z || !std::isfinite(z->real()) || !std::isfinite(z->imag())) {
          if (z) fail(rp + "[" + std::to_string(j) + "]", "non-finite entry");
          ok = false;
          continue;
        }
        a(i, j) = *z;
      }
    }
    if (!ok) return std::nullopt;
    return a;
  }

  std::optional<RMatrix> rmatrix(const Json& v, const std::string& path, int rows, int cols) {
    auto c = cmatrix(v, path, rows, cols);
    if (!c) return std::nullopt;
    if (c->imag().cwiseAbs().maxCoeff() != 0.0) {
      fail(path, "expected real entries");
      return std::nullopt;
    }
    return RMatrix(c->real());
  }

  void require_symmetric(const std::optional<CMatrix>& a, const std::string& path) {
    if (!a) return;
    if ((*a - a->transpose()).norm() > 1e-12 * std::max(a->norm(), 1e-300))
      fail(path, "block is not symmetric");
  }

  std::optional<double> positive(const Json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj[key];
    if (!v.is_number() || !(v.get<double>() > 0)) {
      fail(path + "." + key, "expected a positive number");
      return std::nullopt;
    }
    return v.get<double>();
  }
};

CMatrix symmetrized(const CMatrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

SpecError::SpecError(std::vector<FieldError> errors)
    : InputError(join_errors(errors)), errors_(std::move(errors)) {}

ProblemSpec parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecError(std::vector<FieldError>{{"$", std::string("malformed JSON: ") + e.what()}});
  }
  return parse_problem(j);
}

ProblemSpec parse_problem(const Json& j) {
  Reader r;
  ProblemSpec s;
  if (!j.is_object()) throw SpecError(std::vector<FieldError>{{"$", "expected a JSON object"}});

  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() < 1)
    r.fail("$.n", "expected a positive integer");
  else
    s.n = j["n"].get<int>();

  std::optional<Mode> mode;
  if (!j.contains("mode") || !j["mode"].is_string()) {
    r.fail("$.mode", "expected one of symbol, supersymmetric, normal-form");
  } else {
    const std::string m = j["mode"].get<std::string>();
    if (m == "symbol") mode = Mode::Symbol;
    else if (m == "supersymmetric") mode = Mode::Supersymmetric;
    else if (m == "normal-form") mode = Mode::NormalForm;
    else r.fail("$.mode", "unknown mode '" + m + "'");
  }

  int payloads = 0;
  for (Mode m : {Mode::Symbol, Mode::Supersymmetric, Mode::NormalForm})
    if (j.contains(payload_key(m))) {
      ++payloads;
      if (mode && m != *mode)
        r.fail(std::string("$.") + payload_key(m), "payload does not match the declared mode");
    }
  if (mode && !j.contains(payload_key(*mode)))
    r.fail(std::string("$.") + payload_key(*mode), "missing payload for the declared mode");
  else if (payloads > 1)
    r.fail("$", "exactly one payload must be present");

  const int n = s.n;
  if (mode && n > 0 && j.contains(payload_key(*mode))) {
    s.mode = *mode;
    const std::string base = std::string("$.") + payload_key(*mode);
    const Json& p = j[payload_key(*mode)];
    auto field = [&](const char* key, int rows, int cols) -> std::optional<CMatrix> {
      if (!p.is_object() || !p.contains(key)) {
        r.fail(base + "." + key, "missing");
        return std::nullopt;
      }
      return r.cmatrix(p[key], base + "." + key, rows, cols);
    };
    switch (*mode) {
      case Mode::Symbol: {
        auto qxx = field("qxx", n, n), qxxi = field("qxxi", n, n), qxixi = field("qxixi", n, n);
        r.require_symmetric(qxx, base + ".qxx");
        r.require_symmetric(qxixi, base + ".qxixi");
        if (qxx && qxxi && qxixi && r.errors.empty())
          s.symbol = QuadraticSymbol::make(symmetrized(*qxx), *qxxi, symmetrized(*qxixi));
        break;
      }
      case Mode::Supersymmetric: {
        auto ap = field("aPlus", n, n), am = field("aMinus", n, n), b = field("b", n, n);
        r.require_symmetric(ap, base + ".aPlus");
        r.require_symmetric(am, base + ".aMinus");
        if (ap) s.aPlus = symmetrized(*ap);
        if (am) s.aMinus = symmetrized(*am);
        if (b) s.b = *b;
        break;
      }
      case Mode::NormalForm: {
        if (auto m = field("m", n, n)) s.m = *m;
        const bool hasH = p.is_object() && p.contains("weight_hessian");
        const bool hasBlocks = p.is_object() && p.contains("weight");
        if (hasH == hasBlocks) {
          r.fail(base, "give exactly one of weight_hessian or weight{herm, sym}");
        } else if (hasH) {
          auto h = r.rmatrix(p["weight_hessian"], base + ".weight_hessian", 2 * n, 2 * n);
          if (h) {
            if ((*h - h->transpose()).norm() > 1e-12 * std::max(h->norm(), 1e-300))
              r.fail(base + ".weight_hessian", "block is not symmetric");
            else
              s.weightHessian = 0.5 * (*h + h->transpose());
          }
        } else {
          const Json& w = p["weight"];
          const std::string wp = base + ".weight";
          std::optional<CMatrix> herm, sym;
          if (!w.is_object() || !w.contains("herm")) r.fail(wp + ".herm", "missing");
          else herm = r.cmatrix(w["herm"], wp + ".herm", n, n);
          if (w.is_object() && w.contains("sym")) sym = r.cmatrix(w["sym"], wp + ".sym", n, n);
          else sym = CMatrix::Zero(n, n);
          if (herm && (*herm - herm->adjoint()).norm() > 1e-12 * std::max(herm->norm(), 1e-300))
            r.fail(wp + ".herm", "block is not Hermitian");
          r.require_symmetric(sym, wp + ".sym");
          if (herm && sym)
            s.weightHessian = complex_blocks_to_hessian(0.5 * (*herm + herm->adjoint()),
                                                        symmetrized(*sym));
        }
        break;
      }
    }
  }

  if (j.contains("options")) {
    const Json& o = j["options"];
    if (!o.is_object()) {
      r.fail("$.options", "expected an object");
    } else {
      if (auto v = r.positive(o, "psd_tol", "$.options")) s.options.tol.psd = *v;
      if (auto v = r.positive(o, "cluster_tol", "$.options")) s.options.tol.cluster = *v;
      if (auto v = r.positive(o, "bisect_tol", "$.options")) s.options.tol.bisect = *v;
      if (o.contains("gauge") && n > 0) s.options.gauge = r.cmatrix(o["gauge"], "$.options.gauge", n, n);
      if (o.contains("max_degree")) {
        if (!o["max_degree"].is_number_integer() || o["max_degree"].get<int>() < 0)
          r.fail("$.options.max_degree", "expected a non-negative integer");
        else
          s.options.maxDegree = o["max_degree"].get<int>();
      }
      if (o.contains("seed")) {
        if (!o["seed"].is_number_unsigned()) r.fail("$.options.seed", "expected an unsigned integer");
        else s.options.seed = o["seed"].get<std::uint64_t>();
      }
      if (o.contains("grid")) {
        const Json& g = o["grid"];
        GridSpec gs;
        bool ok = g.is_object();
        auto num = [&](const char* key, double& dst) {
          if (!ok || !g.contains(key) || !g[key].is_number()) {
            r.fail(std::string("$.options.grid.") + key, "expected a number");
            ok = false;
            return;
          }
          dst = g[key].get<double>();
        };
        auto cnt = [&](const char* key, int& dst) {
          if (!ok || !g.contains(key) || !g[key].is_number_integer() || g[key].get<int>() < 1) {
            r.fail(std::string("$.options.grid.") + key, "expected a positive integer");
            ok = false;
            return;
          }
          dst = g[key].get<int>();
        };
        if (!ok) r.fail("$.options.grid", "expected an object");
        num("re_min", gs.reMin);
        num("re_max", gs.reMax);
        cnt("re_count", gs.reCount);
        num("im_min", gs.imMin);
        num("im_max", gs.imMax);
        cnt("im_count", gs.imCount);
        if (ok) s.options.grid = gs;
      }
    }
  }

  if (!r.errors.empty()) throw SpecError(r.errors);
  return s;
}

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(to_json(a(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const RMatrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Tolerances& t) {
  return Json{{"psd_tol", t.psd}, {"cluster_tol", t.cluster}, {"bisect_tol", t.bisect}};
}

Json to_json(const ExtendedReal& x) {
  if (x.is_finite()) return x.value;
  return x.str();
}

Json to_json(const ClassificationReport& r) {
  Json j{{"tau", to_json(r.tau)},
         {"verdict", to_string(r.verdict)},
         {"delta0", to_json(r.delta0)},
         {"norm_bound", r.normBound},
         {"lambda_min", r.lambdaMin}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  j["tolerances"] = to_json(r.tolerances);
  return j;
}

Json to_json(const JordanProbe& jp) {
  Json cl = Json::array();
  for (const auto& c : jp.eigenvalues)
    cl.push_back(Json{{"value", to_json(c.value)},
                      {"multiplicity", c.multiplicity},
                      {"max_block_size", c.maxBlockSize}});
  Json j{{"eigenvalues", cl}, {"tolerance", jp.tolerance}};
  if (!jp.warnings.empty()) j["warnings"] = jp.warnings;
  return j;
}

Json serialize(const ProblemSpec& s) {
  Json j{{"n", s.n}, {"mode", to_string(s.mode)}};
  switch (s.mode) {
    case Mode::Symbol:
      j["symbol"] = Json{{"qxx", to_json(s.symbol.qxx)},
                         {"qxxi", to_json(s.symbol.qxxi)},
                         {"qxixi", to_json(s.symbol.qxixi)}};
      break;
    case Mode::Supersymmetric:
      j["supersymmetric"] =
          Json{{"aPlus", to_json(s.aPlus)}, {"aMinus", to_json(s.aMinus)}, {"b", to_json(s.b)}};
      break;
    case Mode::NormalForm:
      j["normal_form"] = Json{{"m", to_json(s.m)}, {"weight_hessian", to_json(s.weightHessian)}};
      break;
  }
  Json o = to_json(s.options.tol);
  if (s.options.gauge) o["gauge"] = to_json(*s.options.gauge);
  if (s.options.grid) {
    const GridSpec& g = *s.options.grid;
    o["grid"] = Json{{"re_min", g.reMin},   {"re_max", g.reMax}, {"re_count", g.reCount},
                     {"im_min", g.imMin},   {"im_max", g.imMax}, {"im_count", g.imCount}};
  }
  o["max_degree"] = s.options.maxDegree;
  o["seed"] = s.options.seed;
  j["options"] = o;
  return j;
}

bool same_problem(const ProblemSpec& a, const ProblemSpec& b) {
  auto eq = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.size() == 0 || x == y);
  };
  if (a.n != b.n || a.mode != b.mode) return false;
  if (!eq(a.symbol.qxx, b.symbol.qxx) || !eq(a.symbol.qxxi, b.symbol.qxxi) ||
      !eq(a.symbol.qxixi, b.symbol.qxixi))
    return false;
  if (!eq(a.aPlus, b.aPlus) || !eq(a.aMinus, b.aMinus) || !eq(a.b, b.b)) return false;
  if (!eq(a.m, b.m) || !eq(a.weightHessian, b.weightHessian)) return false;
  const auto& oa = a.options;
  const auto& ob = b.options;
  if (oa.tol.psd != ob.tol.psd || oa.tol.cluster != ob.tol.cluster ||
      oa.tol.bisect != ob.tol.bisect || oa.maxDegree != ob.maxDegree || oa.seed != ob.seed)
    return false;
  if (oa.gauge.has_value() != ob.gauge.has_value()) return false;
  if (oa.gauge && !eq(*oa.gauge, *ob.gauge)) return false;
  if (oa.grid.has_value() != ob.grid.has_value()) return false;
  if (oa.grid) {
    const GridSpec &x = *oa.grid, &y = *ob.grid;
    if (x.reMin != y.reMin || x.reMax != y.reMax || x.reCount != y.reCount ||
        x.imMin != y.imMin || x.imMax != y.imMax || x.imCount != y.imCount)
      return false;
  }
  return true;
}

NormalForm build_normal_form(const ProblemSpec& s) {
  const CMatrix* gauge = s.options.gauge ? &*s.options.gauge : nullptr;
  switch (s.mode) {
    case Mode::Symbol: return normal_form(s.symbol, gauge, s.options.tol.cluster);
    case Mode::Supersymmetric:
      return normal_form(make_supersymmetric(s.aPlus, s.aMinus, s.b), gauge);
    case Mode::NormalForm: return NormalForm::direct(s.m, Weight::from_hessian(s.weightHessian));
  }
  throw InputError("unknown mode");
}

namespace {

double parse_real(const std::string& s, const std::string& whole) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("cannot parse number '" + whole + "'");
  }
  if (used != s.size()) throw InputError("cannot parse number '" + whole + "'");
  return v;
}

std::string strip(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  return s;
}

}  // namespace

cplx parse_complex(const std::string& input) {
  const std::string s = strip(input);
  if (s.empty()) throw InputError("empty complex number");
  if (auto comma = s.find(','); comma != std::string::npos)
    return {parse_real(s.substr(0, comma), s), parse_real(s.substr(comma + 1), s)};
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, s), 0.0};
  // a+bi, a-bi, bi
  const std::string body = s.substr(0, s.size() - 1);
  size_t split = std::string::npos;
  for (size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, s);
  };
  if (split == std::string::npos) return {0.0, imag_of(body)};
  return {parse_real(body.substr(0, split), s), imag_of(body.substr(split))};
}

double parse_angle(const std::string& input) {
  const std::string s = strip(input);
  static const std::regex re(R"(^([+-]?)(\d*\.?\d*)\*?pi(?:/(\d+\.?\d*))?$)");
  std::smatch m;
  if (std::regex_match(s, m, re)) {
    double v = std::numbers::pi;
    if (m[2].length() > 0) v *= parse_real(m[2].str(), s);
    if (m[3].length() > 0) v /= parse_real(m[3].str(), s);
    if (m[1].str() == "-") v = -v;
    return v;
  }
  return parse_real(s, s);
}

std::string scan_csv(const RegionGrid& grid) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "# psd_tol=%.17g,cluster_tol=%.17g,bisect_tol=%.17g\n",
                grid.tolerances.psd, grid.tolerances.cluster, grid.tolerances.bisect);
  out += buf;
  out += "re_tau,im_tau,verdict,delta0,norm_bound\n";
  for (const auto& c : grid.cells) {
    char d[64];
    if (!c.delta0.is_finite()) std::snprintf(d, sizeof d, "%s", c.delta0.str().c_str());
    else std::snprintf(d, sizeof d, "%.17g", c.delta0.value + 0.0);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%c,%s,%.17g\n", c.tau.real(), c.tau.imag(),
                  verdict_letter(c.verdict), d, c.normBound);
    out += buf;
  }
  return out;
}

}  // namespace qf
