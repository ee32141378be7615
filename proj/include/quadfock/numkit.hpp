#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Bad shapes, asymmetric blocks and the like.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mathematical hypothesis required by an operation does not hold.
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Overflow, failed bracketing, non-convergence.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Real symmetric matrix. The upper triangle is authoritative; the lower
/// triangle is overwritten on construction so symmetry is exact.
class RealSymmetric {
 public:
  RealSymmetric() = default;
  explicit RealSymmetric(const RMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const RMatrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double quad(const RVector& v) const { return v.dot(m_ * v); }

 private:
  RMatrix m_;
};

enum class Definiteness { PositiveDefinite, PositiveSemidefinite, Indefinite };

const char* to_string(Definiteness d);

struct PsdDetail {
  Definiteness cls = Definiteness::PositiveSemidefinite;
  double lambdaMin = 0.0;
  double scale = 0.0;  // spectral norm of the input
  RVector minVector;   // eigenvector for lambdaMin
};

// e^{tau m} by scaling and squaring with the degree-13 diagonal Pade
// approximant (theta_13 = 5.37).
CMatrix expm(const CMatrix& m, cplx tau);

// 1 - ||e^{-t m}|| evaluated without the cancellation of forming e^{-tm}
// and subtracting the identity. Uses long double internally; intended for
// small t||m||.
double contraction_defect(const CMatrix& m, double t);

Definiteness psd_classify(const RealSymmetric& s, double relTol);
PsdDetail psd_inspect(const RealSymmetric& s, double relTol);

CMatrix herm_sqrt(const CMatrix& p);

struct TakagiResult {
  CMatrix unitary;
  std::vector<double> sigma;  // descending
};

TakagiResult takagi(const CMatrix& sym);

struct JordanCluster {
  cplx value;
  int multiplicity = 1;
  int maxBlockSize = 1;
};

struct JordanProbe {
  std::vector<JordanCluster> eigenvalues;
  double tolerance = 0.0;
  std::vector<std::string> warnings;

  int dimension() const;
};

inline constexpr double kDefaultClusterTol = 1e-8;
inline constexpr double kClusterFloor = 1e-12;
inline constexpr double kRankCutoff = 1e-10;

JordanProbe jordan_probe(const CMatrix& m, double tol = kDefaultClusterTol);

// ---- small helpers shared across modules ----

double spectral_norm(const CMatrix& a);
double spectral_norm(const RMatrix& a);

// Real representation of z -> a z on C^n = R^{2n}, coordinates (Re z, Im z).
RMatrix realify(const CMatrix& a);
RVector to_real(const CVector& z);
CVector to_complex(const RVector& v);

// Orthonormal basis of the numerical kernel (singular values below
// relCut * sigma_max, or all of them when a == 0).
RMatrix real_kernel(const RMatrix& a, double relCut = kRankCutoff);
int numerical_rank(const CMatrix& a, double absCut);

void require_square(const CMatrix& m, const char* what);
void require_finite(const CMatrix& m, const char* what);

}  // namespace qf
