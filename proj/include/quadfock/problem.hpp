#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "quadfock/numkit.hpp"
#include "quadfock/reduction.hpp"
#include "quadfock/semigroup.hpp"
#include "quadfock/symbol.hpp"

namespace qf {

using Json = nlohmann::ordered_json;

enum class Mode { Symbol, Supersymmetric, NormalForm };

const char* to_string(Mode m);  // "symbol", "supersymmetric", "normal-form"

struct ProblemOptions {
  Tolerances tol;
  std::optional<CMatrix> gauge;
  std::optional<GridSpec> grid;
  int maxDegree = 8;
  std::uint64_t seed = 12345;
};

struct ProblemSpec {
  int n = 0;
  Mode mode = Mode::NormalForm;
  // mode symbol
  QuadraticSymbol symbol;
  // mode supersymmetric
  CMatrix aPlus, aMinus, b;
  // mode normal-form
  CMatrix m;
  RMatrix weightHessian;
  ProblemOptions options;
};

struct FieldError {
  std::string path;  // JSON path, e.g. "$.symbol.qxx"
  std::string message;
};

class SpecError : public InputError {
 public:
  explicit SpecError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

// Collects every validation problem before throwing SpecError.
ProblemSpec parse_problem(const std::string& text);
ProblemSpec parse_problem(const Json& j);
inline ProblemSpec parse_problem(const char* text) { return parse_problem(std::string(text)); }
Json serialize(const ProblemSpec& spec);
bool same_problem(const ProblemSpec& a, const ProblemSpec& b);

NormalForm build_normal_form(const ProblemSpec& spec);

// "-3.2", "-3.2,1", "-3.2+1i", "2i"; angles also accept "pi", "pi/2", "-3pi/4".
cplx parse_complex(const std::string& s);
double parse_angle(const std::string& s);

Json to_json(cplx z);
Json to_json(const CMatrix& a);
Json to_json(const CVector& v);
Json to_json(const RMatrix& a);
Json to_json(const Tolerances& t);
Json to_json(const ExtendedReal& x);
Json to_json(const ClassificationReport& r);
Json to_json(const JordanProbe& jp);

// re_tau,im_tau,verdict,delta0,norm_bound with a '#' line echoing tolerances.
std::string scan_csv(const RegionGrid& grid);

}  // namespace qf
