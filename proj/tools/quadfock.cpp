// quadfock: boundedness, regularization and return to equilibrium for
// quadratic operators, via the normal form M z.d_z on a weighted Fock space.

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "quadfock/numkit.hpp"
#include "quadfock/polyoracle.hpp"
#include "quadfock/problem.hpp"
#include "quadfock/reduction.hpp"
#include "quadfock/semigroup.hpp"
#include "quadfock/symbol.hpp"
#include "quadfock/weight.hpp"

namespace {

using qf::Json;

enum ExitCode { kOk = 0, kUsage = 1, kHypothesis = 2, kNumerical = 3 };

struct Common {
  std::string input = "-";
  std::string out;
  double psdTol = -1, clusterTol = -1, bisectTol = -1;
};

struct Args {
  Common common;
  std::string tau = "0";
  std::string rayAngle = "pi";
  double tMax = 8.0;
  int samples = 4000;
  int maxDegree = -1;
  int threads = 0;
  double t = -1;
  int N = 0;
  double reMin = NAN, reMax = NAN, imMin = NAN, imMax = NAN;
  int reCount = 0, imCount = 0;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path);
  if (!in) throw qf::InputError("cannot open input file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw qf::InputError("cannot write '" + out + "'");
  f << text;
}

void emit(const Json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

qf::ProblemSpec load(const Common& c) {
  qf::ProblemSpec spec = qf::parse_problem(read_input(c.input));
  if (c.psdTol > 0) spec.options.tol.psd = c.psdTol;
  if (c.clusterTol > 0) spec.options.tol.cluster = c.clusterTol;
  if (c.bisectTol > 0) spec.options.tol.bisect = c.bisectTol;
  return spec;
}

Json header(const std::string& command, const qf::ProblemSpec& spec) {
  return Json{{"command", command},
              {"mode", qf::to_string(spec.mode)},
              {"n", spec.n},
              {"tolerances", qf::to_json(spec.options.tol)}};
}

Json weight_json(const qf::Weight& w) {
  Json j{{"hessian", qf::to_json(w.hess().matrix())},
         {"herm", qf::to_json(w.herm())},
         {"sym", qf::to_json(w.sym())}};
  const qf::Decomposition d = qf::decompose(w);
  j["g"] = qf::to_json(d.g);
  j["hpp"] = qf::to_json(d.hpp);
  j["delta_ceiling"] = qf::to_json(qf::delta_ceiling(w));
  return j;
}

Json normal_form_json(const qf::NormalForm& nf) {
  Json j{{"m", qf::to_json(nf.m)}, {"weight", weight_json(nf.weight)}};
  if (nf.has_symbol_data()) {
    j["gauge"] = qf::to_json(nf.gauge);
    j["point_map"] = qf::to_json(nf.pointMap);
    j["canonical"] = qf::to_json(nf.canonical);
  }
  return j;
}

Json subell_json(const qf::NormalForm& nf, const qf::Tolerances& tol) {
  Json j;
  const qf::GlobalIndex gi = qf::global_index(nf);
  j["i0"] = qf::index_string(gi.i0);
  j["kernel_chain"] = gi.kernelChain;
  j["small_time_slope"] = qf::small_time_slope(nf);
  const qf::SmallTimeOrder so = qf::small_time_order(nf, tol);
  j["order"] = qf::index_string(so.order);
  if (so.order) {
    j["k1"] = qf::k1_coefficient(nf);
    j["upper_c"] = so.upperC;
    j["lower_c"] = so.lowerC ? Json(*so.lowerC) : Json(nullptr);
  }
  return j;
}

Json rates_json(const qf::ReturnRates& r) {
  Json j{{"rho", r.rho}, {"R", r.bigR}, {"weak_limit_exists", r.weakLimitExists}};
  if (r.thetaPlus) {
    j["theta_plus"] = *r.thetaPlus;
    j["theta_minus"] = *r.thetaMinus;
    j["b_plus"] = *r.bPlus;
    j["b_minus"] = *r.bMinus;
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

int run(const std::string& cmd, const Args& a) {
  const qf::ProblemSpec spec = load(a.common);
  const qf::Tolerances& tol = spec.options.tol;
  const qf::NormalForm nf = qf::build_normal_form(spec);
  Json out = header(cmd, spec);
  const int maxDegree = a.maxDegree >= 0 ? a.maxDegree : spec.options.maxDegree;

  if (cmd == "reduce") {
    out["normal_form"] = normal_form_json(nf);
  } else if (cmd == "analyze") {
    out["normal_form"] = normal_form_json(nf);
    out["spectrum"] = qf::to_json(qf::jordan_probe(nf.m, tol.cluster));
    const qf::RealQForm theta = qf::theta_form(nf);
    const bool thetaPsd = qf::psd_classify(theta.hess, tol.psd) != qf::Definiteness::Indefinite;
    out["theta_psd"] = thetaPsd;
    if (thetaPsd) out["subelliptic"] = subell_json(nf, tol);
    out["return_rates"] = rates_json(qf::return_rates(nf, tol.cluster));
  } else if (cmd == "classify") {
    out["report"] = qf::to_json(qf::classify(nf, qf::parse_complex(a.tau), tol));
  } else if (cmd == "delta0") {
    const qf::cplx tau = qf::parse_complex(a.tau);
    out["tau"] = qf::to_json(tau);
    out["delta0"] = qf::to_json(qf::delta0(nf, tau, tol));
  } else if (cmd == "scan") {
    qf::GridSpec g = spec.options.grid.value_or(qf::GridSpec{-8, 1, 91, -4, 4, 81});
    if (!std::isnan(a.reMin)) g.reMin = a.reMin;
    if (!std::isnan(a.reMax)) g.reMax = a.reMax;
    if (!std::isnan(a.imMin)) g.imMin = a.imMin;
    if (!std::isnan(a.imMax)) g.imMax = a.imMax;
    if (a.reCount > 0) g.reCount = a.reCount;
    if (a.imCount > 0) g.imCount = a.imCount;
    emit(qf::scan_csv(qf::region_scan(nf, g, tol, a.threads)), a.common.out);
    return kOk;
  } else if (cmd == "spectrum") {
    out["spectrum"] = qf::to_json(qf::jordan_probe(nf.m, tol.cluster));
    Json lat = Json::array();
    for (const auto& p : qf::eigenvalue_lattice(nf, maxDegree, tol.cluster))
      lat.push_back(Json{{"alpha", p.alpha},
                         {"lambda", qf::to_json(p.lambda)},
                         {"order", p.order ? Json(*p.order) : Json(nullptr)}});
    out["lattice"] = lat;
  } else if (cmd == "return-rate") {
    out["return_rates"] = rates_json(qf::return_rates(nf, tol.cluster));
    if (a.t > 0) {
      const qf::ReturnBound b = qf::return_bound(nf, a.t, a.N, tol);
      out["bound"] = Json{{"t", a.t}, {"N", a.N}, {"lower", b.lower}, {"upper", b.upper}};
      if (b.exact) out["bound"]["exact"] = *b.exact;
    }
  } else if (cmd == "subell") {
    out["subelliptic"] = subell_json(nf, tol);
  } else if (cmd == "oracle-check") {
    const qf::cplx tau = qf::parse_complex(a.tau);
    const qf::ClassificationReport r = qf::classify(nf, tau, tol);
    out["report"] = qf::to_json(r);
    Json norms = Json::array();
    for (int d = 0; d <= maxDegree; ++d) norms.push_back(qf::truncated_norm(nf, tau, d));
    out["truncated_norms"] = norms;
    out["change_of_vars_error"] =
        qf::change_of_vars_identity_check(nf, tau, std::min(maxDegree, 6), spec.options.seed);
  } else if (cmd == "transitions") {
    const double angle = qf::parse_angle(a.rayAngle);
    out["ray_angle"] = angle;
    out["t_max"] = a.tMax;
    out["times"] = qf::transition_times(nf, angle, a.tMax, tol, a.samples);
  } else {
    throw qf::InputError("unknown command " + cmd);
  }
  emit(out, a.common.out);
  return kOk;
}

int fail(const char* kind, const std::string& msg, int code, const Json& extra = {}) {
  Json j{{"error", kind}, {"message", msg}};
  if (!extra.is_null()) j["details"] = extra;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadfock: quadratic operators through their Fock-space normal form"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("input", a.common.input, "problem JSON file, '-' for stdin");
    sub->add_option("--out", a.common.out, "write the result here instead of stdout");
    sub->add_option("--psd-tol", a.common.psdTol, "relative PSD tolerance");
    sub->add_option("--cluster-tol", a.common.clusterTol, "eigenvalue clustering tolerance");
    sub->add_option("--bisect-tol", a.common.bisectTol, "bisection width for delta0");
  };
  auto taued = [&](CLI::App* sub) {
    sub->add_option("--tau", a.tau, "complex time, e.g. -3.2 or -1+2i")->required();
  };

  std::vector<std::pair<std::string, std::string>> cmds = {
      {"analyze", "normal form, spectrum, ellipticity and rates"},
      {"reduce", "normal form data only"},
      {"classify", "Unbounded / Bounded / Compact at one tau"},
      {"delta0", "regularization exponent at one tau"},
      {"scan", "CSV verdict grid over complex tau"},
      {"spectrum", "Jordan probe and eigenvalue lattice"},
      {"return-rate", "return to equilibrium rates"},
      {"subell", "index I0 and small-time constants"},
      {"oracle-check", "truncated polynomial norms against the classifier"},
      {"transitions", "verdict changes along a ray"}};
  for (const auto& [name, help] : cmds) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    if (name == "classify" || name == "delta0" || name == "oracle-check") taued(sub);
    if (name == "spectrum" || name == "oracle-check")
      sub->add_option("--max-degree", a.maxDegree, "degree cap");
    if (name == "transitions") {
      sub->add_option("--ray-angle", a.rayAngle, "tau = t e^{i angle}; accepts pi, pi/2, ...");
      sub->add_option("--t-max", a.tMax, "largest t");
      sub->add_option("--samples", a.samples, "sampling points before refinement");
    }
    if (name == "return-rate") {
      sub->add_option("--t", a.t, "report the bound at this t");
      sub->add_option("--N", a.N, "Taylor truncation level");
    }
    if (name == "scan") {
      sub->add_option("--re-min", a.reMin);
      sub->add_option("--re-max", a.reMax);
      sub->add_option("--re-count", a.reCount);
      sub->add_option("--im-min", a.imMin);
      sub->add_option("--im-max", a.imMax);
      sub->add_option("--im-count", a.imCount);
      sub->add_option("--threads", a.threads, "0 = hardware concurrency");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run(cmd, a);
  } catch (const qf::SpecError& e) {
    Json errs = Json::array();
    for (const auto& fe : e.errors()) errs.push_back(Json{{"path", fe.path}, {"message", fe.message}});
    return fail("input", e.what(), kUsage, errs);
  } catch (const qf::InputError& e) {
    return fail("input", e.what(), kUsage);
  } catch (const qf::HypothesisError& e) {
    return fail("hypothesis", e.what(), kHypothesis);
  } catch (const qf::NumericalError& e) {
    return fail("numerical", e.what(), kNumerical);
  }
}
