#include "quadfock/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qf {

std::string index_string(const Index& i) { return i ? std::to_string(*i) : std::string("inf"); }

QuadraticSymbol QuadraticSymbol::make(CMatrix qxx, CMatrix qxxi, CMatrix qxixi) {
  const auto n = qxx.rows();
  if (n == 0 || qxx.cols() != n || qxxi.rows() != n || qxxi.cols() != n || qxixi.rows() != n ||
      qxixi.cols() != n)
    throw InputError("QuadraticSymbol: blocks must all be n x n");
  require_finite(qxx, "qxx");
  require_finite(qxxi, "qxxi");
  require_finite(qxixi, "qxixi");
  const double scale = std::max({qxx.norm(), qxxi.norm(), qxixi.norm(), 1e-300});
  if ((qxx - qxx.transpose()).norm() > 1e-12 * scale) throw InputError("qxx is not symmetric");
  if ((qxixi - qxixi.transpose()).norm() > 1e-12 * scale)
    throw InputError("qxixi is not symmetric");
  QuadraticSymbol q;
  q.n = static_cast<int>(n);
  q.qxx = 0.5 * (qxx + qxx.transpose());
  q.qxxi = std::move(qxxi);
  q.qxixi = 0.5 * (qxixi + qxixi.transpose());
  return q;
}

QuadraticSymbol QuadraticSymbol::from_matrix(const CMatrix& Q) {
  if (Q.rows() != Q.cols() || Q.rows() % 2 != 0)
    throw InputError("QuadraticSymbol: expected a 2n x 2n matrix");
  const CMatrix S = 0.5 * (Q + Q.transpose());
  const auto n = Q.rows() / 2;
  return make(S.topLeftCorner(n, n), S.topRightCorner(n, n), S.bottomRightCorner(n, n));
}

CMatrix QuadraticSymbol::matrix() const {
  CMatrix Q(2 * n, 2 * n);
  Q << qxx, qxxi, qxxi.transpose(), qxixi;
  return Q;
}

cplx QuadraticSymbol::operator()(const CVector& v) const {
  return (v.transpose() * matrix() * v)(0, 0);
}

cplx QuadraticSymbol::operator()(const RVector& v) const {
  return (*this)(CVector(v.cast<cplx>()));
}

QuadraticSymbol QuadraticSymbol::real_part() const {
  return make(qxx.real().cast<cplx>(), qxxi.real().cast<cplx>(), qxixi.real().cast<cplx>());
}

QuadraticSymbol QuadraticSymbol::imag_part() const {
  return make(qxx.imag().cast<cplx>(), qxxi.imag().cast<cplx>(), qxixi.imag().cast<cplx>());
}

QuadraticSymbol QuadraticSymbol::compose(const RMatrix& K) const {
  const CMatrix Kc = K.cast<cplx>();
  return from_matrix(Kc.transpose() * matrix() * Kc);
}

RMatrix symplectic_j(int n) {
  RMatrix J = RMatrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = RMatrix::Identity(n, n);
  J.bottomLeftCorner(n, n) = -RMatrix::Identity(n, n);
  return J;
}

FundamentalMatrix fundamental_matrix(const QuadraticSymbol& q) {
  // 1/2 [[q''_{xi x}, q''_{xi xi}], [-q''_{xx}, -q''_{x xi}]] = J Q
  return {symplectic_j(q.n).cast<cplx>() * q.matrix()};
}

QuadraticSymbol symbol_of(const FundamentalMatrix& F) {
  const int n = static_cast<int>(F.f.rows() / 2);
  return QuadraticSymbol::from_matrix(-symplectic_j(n).cast<cplx>() * F.f);
}

cplx symplectic(const CVector& v, const CVector& w) {
  if (v.size() != w.size() || v.size() % 2 != 0)
    throw InputError("symplectic: dimension mismatch");
  const auto n = v.size() / 2;
  return (v.tail(n).transpose() * w.head(n))(0) - (w.tail(n).transpose() * v.head(n))(0);
}

QuadraticSymbol poisson_bracket(const QuadraticSymbol& q1, const QuadraticSymbol& q2) {
  if (q1.n != q2.n) throw InputError("poisson_bracket: dimension mismatch");
  const CMatrix F1 = fundamental_matrix(q1).f, F2 = fundamental_matrix(q2).f;
  return symbol_of({-2.0 * (F1 * F2 - F2 * F1)});
}

// ---------------------------------------------------------------- flag

namespace {

struct ZeroSearch {
  RVector v;
  double absq;
};

// Gauss-Newton on the two real equations Re q = Im q = 0, restricted to the
// unit sphere, after a few projected gradient steps on |q|^2.
ZeroSearch descend(const RMatrix& A, const RMatrix& B, RVector v) {
  auto eval = [&](const RVector& u) { return cplx(u.dot(A * u), u.dot(B * u)); };
  v.normalize();
  for (int it = 0; it < 200; ++it) {
    const cplx qv = eval(v);
    if (std::abs(qv) < 1e-15) break;
    RMatrix Jm(2, v.size());
    Jm.row(0) = 2.0 * (A * v).transpose();
    Jm.row(1) = 2.0 * (B * v).transpose();
    // tangent projection
    const RMatrix P = RMatrix::Identity(v.size(), v.size()) - v * v.transpose();
    Jm = Jm * P;
    Eigen::Vector2d r(qv.real(), qv.imag());
    RVector step = Jm.completeOrthogonalDecomposition().solve(-r);
    double lam = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls) {
      RVector cand = (v + lam * step).normalized();
      if (std::abs(eval(cand)) < std::abs(qv)) {
        v = cand;
        moved = true;
        break;
      }
      lam *= 0.5;
    }
    if (!moved) break;
  }
  return {v, std::abs(eval(v))};
}

}  // namespace

SpectrumFlag spectrum_is_C_flag(const QuadraticSymbol& q, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw InputError("spectrum_is_C_flag: restarts must be >= 1");
  const CMatrix Q = q.matrix();
  const double scale = std::max(spectral_norm(Q), 1e-300);
  const RMatrix A = Q.real() / scale, B = Q.imag() / scale;
  const QuadraticSymbol br = poisson_bracket(q.imag_part(), q.real_part());
  const CMatrix Qb = br.matrix();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SpectrumFlag out;
  out.restarts = restarts;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    RVector v(2 * q.n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
    const ZeroSearch z = descend(A, B, v);
    const double absq = z.absq * scale;
    const double brv = std::real((z.v.cast<cplx>().transpose() * Qb * z.v.cast<cplx>())(0));
    if (absq <= 1e-8 && std::abs(brv) >= 1e-6) {
      // best witness: smallest |q|, then largest bracket
      if (!have || absq < out.symbolValue ||
          (absq == out.symbolValue && std::abs(brv) > std::abs(out.bracketValue))) {
        have = true;
        out.witness = z.v;
        out.symbolValue = absq;
        out.bracketValue = brv;
      }
    }
  }
  out.raised = have;
  out.note = have ? "real zero of q with nonvanishing {Im q, Re q}: spectrum is the whole plane"
                  : "no witness found; heuristic search, not a proof that none exists";
  return out;
}

Index index_J(const QuadraticSymbol& q, const RVector& v) {
  if (v.size() != 2 * q.n) throw InputError("index_J: dimension mismatch");
  if (v.norm() == 0.0) throw InputError("index_J: v must be nonzero");
  const RMatrix ReQ = q.matrix().real();
  if (psd_classify(RealSymmetric(ReQ), 1e-10) == Definiteness::Indefinite)
    throw HypothesisError("index_J: Re q is not positive semidefinite");
  const CMatrix F = fundamental_matrix(q).f;
  const RMatrix ReF = F.real(), ImF = F.imag();
  const double nf = std::max(spectral_norm(F), 1e-300);
  RVector w = v;
  for (int k = 0; k <= 2 * q.n - 1; ++k) {
    if ((ReF * w).norm() > 1e-10 * std::pow(nf, k + 1) * v.norm()) return k;
    w = ImF * w;
  }
  return std::nullopt;
}

}  // namespace qf
