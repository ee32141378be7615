#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadfock/numkit.hpp"
#include "quadfock/reduction.hpp"
#include "quadfock/weight.hpp"

namespace qf {

enum class Verdict { Unbounded, Bounded, Compact };

const char* to_string(Verdict v);
char verdict_letter(Verdict v);  // U, B, C

inline constexpr double kDefaultPsdTol = 1e-10;
inline constexpr double kDefaultBisectTol = 1e-10;
inline constexpr int kMaxBracketDoublings = 60;
// Differences R^T H R - H below this fraction of ||R^T H R|| + ||H|| are roundoff and read as 0.
inline constexpr double kDifferenceNoiseFloor = 1e-13;

struct Tolerances {
  double psd = kDefaultPsdTol;
  double cluster = kDefaultClusterTol;
  double bisect = kDefaultBisectTol;
};

struct ClassificationReport {
  cplx tau;
  Verdict verdict = Verdict::Unbounded;
  ExtendedReal delta0;
  double normBound = 0.0;  // e^{-Re(tau tr M)}
  double lambdaMin = 0.0;  // of the Hessian of Phi(e^{-tau M} z) - Phi(z)
  std::optional<CVector> witness;
  Tolerances tolerances;
};

// Hessian of z -> Phi(e^{-tau M} z) - Phi(z), floored at kDifferenceNoiseFloor.
RealSymmetric difference_hessian(const NormalForm& nf, cplx tau);

ClassificationReport classify(const NormalForm& nf, cplx tau, const Tolerances& tol = {});
Verdict classify_verdict(const NormalForm& nf, cplx tau, double psdTol = kDefaultPsdTol);

ExtendedReal delta0(const NormalForm& nf, cplx tau, const Tolerances& tol = {});

double small_time_slope(const NormalForm& nf);

struct SmallTimeOrder {
  Index order;  // 2 I0 + 1, or infinite: never compact for small t
  double upperC = 0.0;
  std::optional<double> lowerC;  // empirical, only when delta0 is resolvable
};

SmallTimeOrder small_time_order(const NormalForm& nf, const Tolerances& tol = {});

struct LatticePoint {
  std::vector<int> alpha;
  cplx lambda;
  std::optional<int> order;  // 1 + sum r~_j alpha_j when Jordan data is unambiguous
};

std::vector<LatticePoint> eigenvalue_lattice(const NormalForm& nf, int maxDegree,
                                             double clusterTol = kDefaultClusterTol);

struct ReturnRates {
  double rho = 0.0;
  int bigR = 1;
  std::optional<double> thetaPlus, thetaMinus, bPlus, bMinus;
  bool weakLimitExists = false;
  std::string note;

  double rate(double t) const;  // A(t) = t^{R-1} e^{-rho t}
};

ReturnRates return_rates(const NormalForm& nf, double clusterTol = kDefaultClusterTol);

struct ReturnBound {
  double lower = 0.0;  // A(t)^{N+1}
  double upper = 0.0;  // ||G e^{-tM} G^{-1}||^{N+1}
  std::optional<double> exact;  // ||e^{-tM}||^{N+1} when h = 0
};

ReturnBound return_bound(const NormalForm& nf, double t, int N, const Tolerances& tol = {});

struct GridSpec {
  double reMin = -1, reMax = 1;
  int reCount = 1;
  double imMin = -1, imMax = 1;
  int imCount = 1;

  double re(int i) const;
  double im(int j) const;
};

/// Cells are stored row-major: cells[j * reCount + i] sits at (re(i), im(j)).
struct RegionGrid {
  GridSpec grid;
  std::vector<ClassificationReport> cells;
  Tolerances tolerances;

  const ClassificationReport& at(int i, int j) const { return cells[j * grid.reCount + i]; }
};

RegionGrid region_scan(const NormalForm& nf, const GridSpec& grid, const Tolerances& tol = {},
                       int threads = 0, bool withDelta0 = true);

// Verdict changes along tau = t e^{i angle}, 0 < t <= tMax.
std::vector<double> transition_times(const NormalForm& nf, double angle, double tMax,
                                     const Tolerances& tol = {}, int samples = 4000,
                                     double timeTol = 1e-7);

enum class LargeTauVerdict { GuaranteedBoundedRegion, GuaranteedUnboundedRegion, Inconclusive };

const char* to_string(LargeTauVerdict v);

struct SphereConstants {
  double c0 = 1.0, c1 = 1.0;
};

SphereConstants sphere_constants(const Weight& w, double delta = 0.0);
LargeTauVerdict large_tau_verdict(const NormalForm& nf, cplx tau);

Verdict linear_extension_classify(const NormalForm& nf, const CVector& a, const CVector& b,
                                  cplx tau, double psdTol = kDefaultPsdTol);

struct ImaginarySplit {
  bool hasImaginary = false;
  CMatrix vBasis, wBasis;
  bool orthogonalVerified = false;
  bool skewVerified = false;
  bool hCancellationVerified = false;
};

ImaginarySplit imaginary_split(const NormalForm& nf, double clusterTol = kDefaultClusterTol);

enum class SharedGroundState { Bounded, Unbounded, NotApplicable };

const char* to_string(SharedGroundState s);

SharedGroundState shared_ground_state_criterion(const QuadraticSymbol& q1,
                                                const QuadraticSymbol& q2, double delta1,
                                                double delta2);

}  // namespace qf
