#include "quadfock/weight.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "quadfock/reduction.hpp"

namespace qf {

std::string ExtendedReal::str() const {
  switch (kind) {
    case Kind::PlusInfinity: return "inf";
    case Kind::MinusInfinity: return "-inf";
    case Kind::Finite: break;
  }
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

RealQForm RealQForm::pullback(const CMatrix& a) const {
  const RMatrix R = realify(a);
  return {RealSymmetric(R.transpose() * hess.matrix() * R)};
}

RMatrix complex_blocks_to_hessian(const CMatrix& herm, const CMatrix& sym) {
  const auto n = herm.rows();
  const RMatrix Pr = herm.real(), Pi = herm.imag(), Sr = sym.real(), Si = sym.imag();
  RMatrix H(2 * n, 2 * n);
  H << Pr + Sr, -Pi - Si, Pi - Si, Pr - Sr;
  return H;
}

Weight Weight::from_hessian(const RMatrix& hess) {
  if (hess.rows() != hess.cols() || hess.rows() == 0 || hess.rows() % 2 != 0)
    throw InputError("Weight: Hessian must be 2n x 2n");
  if (!hess.allFinite()) throw InputError("Weight: non-finite Hessian entry");
  if ((hess - hess.transpose()).norm() > 1e-12 * std::max(hess.norm(), 1e-300))
    throw InputError("Weight: Hessian is not symmetric");
  Weight w;
  w.n_ = static_cast<int>(hess.rows() / 2);
  w.form_ = {RealSymmetric(0.5 * (hess + hess.transpose()))};
  const PsdDetail d = psd_inspect(w.form_.hess, 1e-12);
  if (d.cls != Definiteness::PositiveDefinite) {
    std::ostringstream os;
    os << "weight is not strictly convex (smallest Hessian eigenvalue " << d.lambdaMin << ")";
    throw HypothesisError(os.str());
  }
  return w;
}

Weight Weight::from_complex(const CMatrix& herm, const CMatrix& sym) {
  return from_hessian(complex_blocks_to_hessian(herm, sym));
}

Weight Weight::standard(int n) {
  return from_complex(CMatrix::Identity(n, n), CMatrix::Zero(n, n));
}

CMatrix Weight::herm() const {
  const RMatrix& H = form_.hess.matrix();
  const int n = n_;
  const RMatrix Pr = 0.5 * (H.topLeftCorner(n, n) + H.bottomRightCorner(n, n));
  const RMatrix Pi = 0.5 * (H.bottomLeftCorner(n, n) - H.topRightCorner(n, n));
  CMatrix P(n, n);
  P.real() = Pr;
  P.imag() = Pi;
  return P;
}

CMatrix Weight::sym() const {
  const RMatrix& H = form_.hess.matrix();
  const int n = n_;
  const RMatrix Sr = 0.5 * (H.topLeftCorner(n, n) - H.bottomRightCorner(n, n));
  const RMatrix Si = -0.5 * (H.topRightCorner(n, n) + H.bottomLeftCorner(n, n));
  CMatrix S(n, n);
  S.real() = Sr;
  S.imag() = Si;
  return S;
}

Decomposition decompose(const Weight& w) {
  Decomposition d;
  const CMatrix P = w.herm();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(P);
  if (es.eigenvalues()(0) <= 0.0)
    throw HypothesisError("weight: Hermitian part is not positive definite");
  d.g = herm_sqrt(P);
  d.hpp = -w.sym();
  const CMatrix gi = d.g.inverse();
  d.bigH = gi.transpose() * d.hpp * gi;
  return d;
}

ExtendedReal delta_ceiling(const Weight& w) {
  const double h = spectral_norm(decompose(w).bigH);
  if (h <= 1e-13) return ExtendedReal::plus_infinity();
  return ExtendedReal::finite(-0.5 * std::log(h));
}

ShiftedWeight shifted_weight(const Weight& w, double delta) {
  const CMatrix zero = CMatrix::Zero(w.n(), w.n());
  const RMatrix extra = (std::exp(-2.0 * delta) - 1.0) * complex_blocks_to_hessian(w.herm(), zero);
  ShiftedWeight s;
  s.form = {RealSymmetric(w.hess().matrix() + extra)};
  s.strictlyConvex = psd_classify(s.form.hess, 1e-12) == Definiteness::PositiveDefinite;
  return s;
}

RealQForm theta_form(const NormalForm& nf) {
  const RMatrix R = realify(nf.m);
  const RMatrix& H = nf.weight.hess().matrix();
  return {RealSymmetric(R.transpose() * H + H * R)};
}

namespace {

void require_theta_psd(const RealQForm& theta, const char* who) {
  if (psd_classify(theta.hess, 1e-10) == Definiteness::Indefinite)
    throw HypothesisError(std::string(who) + ": Theta is indefinite");
}

double theta_scale(const RealQForm& theta) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(theta.hess.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().maxCoeff();
}

RMatrix psd_sqrt(const RMatrix& a) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(a);
  const RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

// Orthonormal real basis of V_k = {z : Theta(M^j z) = 0, j <= k}; k = -1
// gives the whole space.
RMatrix kernel_chain_space(const NormalForm& nf, const RealQForm& theta, int k) {
  const int dim = 2 * nf.n();
  if (k < 0) return RMatrix::Identity(dim, dim);
  const double mn = std::max(spectral_norm(nf.m), 1e-300);
  const RMatrix Rm = realify(nf.m / mn);
  const RMatrix S = psd_sqrt(theta.hess.matrix());
  RMatrix stack(dim * (k + 1), dim);
  RMatrix P = RMatrix::Identity(dim, dim);
  for (int j = 0; j <= k; ++j) {
    stack.middleRows(j * dim, dim) = S * P;
    P = Rm * P;
  }
  return real_kernel(stack, kRankCutoff);
}

}  // namespace

double escape_prefactor(int I) {
  double binom = 1.0;
  for (int j = 1; j <= I; ++j) binom = binom * (I + j) / j;
  double fact = 1.0;
  for (int j = 2; j <= 2 * I + 1; ++j) fact *= j;
  return binom / fact;
}

Index index_I(const NormalForm& nf, const CVector& z) {
  if (z.size() != nf.n()) throw InputError("index_I: dimension mismatch");
  const RealQForm theta = theta_form(nf);
  require_theta_psd(theta, "index_I");
  const double ts = theta_scale(theta);
  CVector w = z;
  for (int k = 0; k <= 2 * nf.n() - 2; ++k) {
    const double nw = w.squaredNorm();
    if (nw > 0.0 && theta(w) > 1e-10 * ts * nw) return k;
    w = nf.m * w;
  }
  return std::nullopt;
}

GlobalIndex global_index(const NormalForm& nf) {
  const RealQForm theta = theta_form(nf);
  require_theta_psd(theta, "global_index");
  GlobalIndex out;
  for (int k = 0; k <= 2 * nf.n() - 2; ++k) {
    const RMatrix V = kernel_chain_space(nf, theta, k);
    out.kernelChain.push_back(static_cast<int>(V.cols()));
    if (V.cols() == 0) {
      out.i0 = k;
      return out;
    }
  }
  out.i0 = std::nullopt;
  return out;
}

double escape_coefficient(const NormalForm& nf, const CVector& z) {
  const Index I = index_I(nf, z);
  if (!I) throw HypothesisError("escape_coefficient: I(z) is infinite");
  CVector w = z;
  for (int k = 0; k < *I; ++k) w = nf.m * w;
  return escape_prefactor(*I) * theta_form(nf)(w);
}

double k1_coefficient(const NormalForm& nf) {
  const GlobalIndex gi = global_index(nf);
  if (!gi.i0) throw HypothesisError("k1_coefficient: I0 is infinite");
  const int i0 = *gi.i0;
  const RealQForm theta = theta_form(nf);
  const RMatrix B = kernel_chain_space(nf, theta, i0 - 1);
  CMatrix Mp = CMatrix::Identity(nf.n(), nf.n());
  for (int k = 0; k < i0; ++k) Mp = nf.m * Mp;
  const RMatrix R = realify(Mp);
  const RMatrix num = 0.5 * B.transpose() * R.transpose() * theta.hess.matrix() * R * B;
  const RMatrix HP = complex_blocks_to_hessian(nf.weight.herm(), CMatrix::Zero(nf.n(), nf.n()));
  const RMatrix den = B.transpose() * HP * B;
  Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> ges(0.5 * (num + num.transpose()),
                                                        0.5 * (den + den.transpose()),
                                                        Eigen::EigenvaluesOnly);
  return escape_prefactor(i0) * ges.eigenvalues()(0);
}

}  // namespace qf
