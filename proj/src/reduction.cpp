#include "quadfock/reduction.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qf {

StablePlanes stable_planes(const FundamentalMatrix& f, double tol) {
  const CMatrix& F = f.f;
  require_square(F, "stable_planes");
  if (F.rows() % 2 != 0) throw InputError("stable_planes: odd dimension");
  const Eigen::Index N = F.rows(), n = N / 2;
  const double nf = std::max(spectral_norm(F), 1e-300);

  Eigen::ComplexEigenSolver<CMatrix> ces(F, false);
  int up = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const cplx l = ces.eigenvalues()(i);
    if (std::abs(l.imag()) <= tol * nf) {
      std::ostringstream os;
      os << "degenerate split: eigenvalue " << l << " of F is too close to the real axis";
      throw HypothesisError(os.str());
    }
    if (l.imag() > 0) ++up;
  }
  if (up != n) throw HypothesisError("stable_planes: dim Lambda+ != n");

  // Matrix sign of -iF, Newton iteration with determinant scaling.
  CMatrix X = cplx(0, -1) * F;
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<CMatrix> lu(X);
    const double c = std::pow(std::abs(lu.determinant()), -1.0 / static_cast<double>(N));
    const double cc = (std::isfinite(c) && c > 0 && it < 10) ? c : 1.0;
    CMatrix Xn = 0.5 * (cc * X + lu.inverse() / cc);
    const double diff = (Xn - X).norm();
    X = Xn;
    if (diff <= 1e-14 * X.norm()) break;
  }
  const CMatrix I = CMatrix::Identity(N, N);
  auto range_basis = [&](const CMatrix& P) {
    Eigen::JacobiSVD<CMatrix> svd(P, Eigen::ComputeFullU);
    return CMatrix(svd.matrixU().leftCols(n));
  };
  StablePlanes out{range_basis(0.5 * (I + X)), range_basis(0.5 * (I - X))};
  for (const CMatrix* B : {&out.plus, &out.minus}) {
    const CMatrix R = F * (*B) - (*B) * (B->adjoint() * F * (*B));
    if (R.norm() > 1e-9 * nf) throw NumericalError("stable_planes: basis is not F-invariant");
  }
  return out;
}

GraphPlane lagrangian_graph(const CMatrix& basis) {
  if (basis.rows() != 2 * basis.cols()) throw InputError("lagrangian_graph: basis must be 2n x n");
  const Eigen::Index n = basis.cols();
  const CMatrix X = basis.topRows(n), Xi = basis.bottomRows(n);
  Eigen::JacobiSVD<CMatrix> svd(X);
  const RVector& s = svd.singularValues();
  if (s(n - 1) <= 1e-12 * s(0)) throw HypothesisError("plane not a graph over base");
  GraphPlane g;
  g.a = X.transpose().partialPivLu().solve(Xi.transpose()).transpose();  // Xi X^{-1}
  g.asymmetry = (g.a - g.a.transpose()).norm();
  const CMatrix as = 0.5 * (g.a + g.a.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(as.imag(), Eigen::EigenvaluesOnly);
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  if (es.eigenvalues()(0) > 1e-10 * scale) g.imSign = 1;
  else if (es.eigenvalues()(n - 1) < -1e-10 * scale) g.imSign = -1;
  return g;
}

QuadraticSymbol SupersymmetricForm::symbol() const {
  // (xi - A_- x)^T B^T (xi - A_+ x)
  const CMatrix qxx = aMinus * b.transpose() * aPlus;
  const CMatrix qxxi = -0.5 * (aPlus * b + aMinus * b.transpose());
  const CMatrix qxixi = b.transpose();
  return QuadraticSymbol::make(0.5 * (qxx + qxx.transpose()), qxxi,
                               0.5 * (qxixi + qxixi.transpose()));
}

SupersymmetricForm make_supersymmetric(CMatrix aPlus, CMatrix aMinus, CMatrix b) {
  const auto n = aPlus.rows();
  if (n == 0 || aPlus.cols() != n || aMinus.rows() != n || aMinus.cols() != n || b.rows() != n ||
      b.cols() != n)
    throw InputError("supersymmetric form: blocks must all be n x n");
  for (const CMatrix* a : {&aPlus, &aMinus})
    if ((*a - a->transpose()).norm() > 1e-12 * std::max(a->norm(), 1.0))
      throw InputError("supersymmetric form: A+- must be symmetric");
  Eigen::SelfAdjointEigenSolver<RMatrix> ep(aPlus.imag(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<RMatrix> em(aMinus.imag(), Eigen::EigenvaluesOnly);
  if (!(ep.eigenvalues()(0) > 1e-10) || !(em.eigenvalues()(n - 1) < -1e-10))
    throw HypothesisError("supersymmetric form: need Im A+ > 0 and Im A- < 0");
  SupersymmetricForm s;
  s.aPlus = 0.5 * (aPlus + aPlus.transpose());
  s.aMinus = 0.5 * (aMinus + aMinus.transpose());
  s.b = std::move(b);
  return s;
}

SupersymmetricForm supersymmetric_decompose(const QuadraticSymbol& q, double tol) {
  const StablePlanes planes = stable_planes(fundamental_matrix(q), tol);
  const GraphPlane gp = lagrangian_graph(planes.plus);
  const GraphPlane gm = lagrangian_graph(planes.minus);
  if (gp.imSign != 1 || gm.imSign != -1)
    throw HypothesisError(
        "the stable planes are not positive/negative definite: operator is outside the scope "
        "of the reduction");
  const int n = q.n;
  const CMatrix Ap = 0.5 * (gp.a + gp.a.transpose());
  const CMatrix Am = 0.5 * (gm.a + gm.a.transpose());

  // Least squares for vec(B) against the three coefficient blocks.
  const int nn = n * n;
  CMatrix L(3 * nn, nn);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      CMatrix E = CMatrix::Zero(n, n);
      E(k, l) = 1.0;
      const CMatrix xixi = 0.5 * (E + E.transpose());
      const CMatrix xxi = -0.5 * (Ap * E + Am * E.transpose());
      const CMatrix t = Am * E.transpose() * Ap;
      const CMatrix xx = 0.5 * (t + t.transpose());
      const int col = k * n + l;
      L.block(0, col, nn, 1) = xixi.reshaped();
      L.block(nn, col, nn, 1) = xxi.reshaped();
      L.block(2 * nn, col, nn, 1) = xx.reshaped();
    }
  CVector rhs(3 * nn);
  rhs << q.qxixi.reshaped(), q.qxxi.reshaped(), q.qxx.reshaped();
  const CVector bv = L.colPivHouseholderQr().solve(rhs);
  SupersymmetricForm s;
  s.aPlus = Ap;
  s.aMinus = Am;
  s.b = CMatrix(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) s.b(k, l) = bv(k * n + l);
  s.residual = (L * bv - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (s.residual > 1e-8) {
    std::ostringstream os;
    os << "supersymmetric fit residual " << s.residual << " exceeds 1e-8";
    throw NumericalError(os.str());
  }
  return s;
}

NormalForm NormalForm::direct(CMatrix m, Weight w) {
  require_square(m, "normal form M");
  require_finite(m, "normal form M");
  if (w.n() != m.rows()) throw InputError("normal form: weight and M dimensions differ");
  NormalForm nf;
  nf.m = std::move(m);
  nf.weight = std::move(w);
  nf.gauge = CMatrix::Identity(nf.m.rows(), nf.m.rows());
  return nf;
}

CVector NormalForm::point(const RVector& xXi) const {
  if (!has_symbol_data()) throw InputError("normal form has no phase-space point map");
  return to_complex(pointMap * xXi);
}

NormalForm normal_form(const SupersymmetricForm& s, const CMatrix* gauge) {
  const Eigen::Index n = s.aPlus.rows();
  const CMatrix L = gauge ? *gauge : CMatrix::Identity(n, n);
  if (L.rows() != n || L.cols() != n) throw InputError("gauge has wrong dimensions");
  {
    Eigen::JacobiSVD<CMatrix> svd(L);
    if (svd.singularValues()(n - 1) <= 1e-12 * svd.singularValues()(0))
      throw InputError("gauge matrix is singular");
  }
  const CMatrix D = s.aPlus - s.aMinus;
  const CMatrix W = D.inverse();
  const CMatrix Linv = L.inverse();
  const CMatrix Lp = Linv.transpose() * W;  // L'^T L = W

  NormalForm nf;
  nf.gauge = L;
  nf.m = cplx(0, -1) * L * D * s.b * Linv;

  CMatrix Cz(n, 2 * n), Cze(n, 2 * n);
  Cz << -L * s.aMinus, L;
  Cze << -Lp * s.aPlus, Lp;
  nf.canonical = CMatrix(2 * n, 2 * n);
  nf.canonical << Cz, Cze;
  {
    const CMatrix J = symplectic_j(static_cast<int>(n)).cast<cplx>();
    const CMatrix K = nf.canonical;
    const double err = (K.transpose() * J * K - J).norm();
    if (err > 1e-10 * std::max(1.0, K.squaredNorm()))
      throw NumericalError("normal_form: constructed map is not canonical");
  }

  RMatrix Z(2 * n, 2 * n);
  Z << Cz.real(), Cz.imag();
  Eigen::FullPivLU<RMatrix> zlu(Z);
  if (!zlu.isInvertible()) throw HypothesisError("normal_form: z is not a coordinate on R^{2n}");
  nf.pointMap = Z;
  const RMatrix T = zlu.inverse();
  const CMatrix Y = Cz.transpose() * Cze;
  const RMatrix Hw = -(0.5 * (Y + Y.transpose())).imag();
  const RMatrix Hv = T.transpose() * Hw * T;
  try {
    nf.weight = Weight::from_hessian(0.5 * (Hv + Hv.transpose()));
  } catch (const HypothesisError& e) {
    throw HypothesisError(std::string("reduction produced non-convex weight: ") + e.what());
  }
  nf.lambdaPlusBasis = CMatrix(2 * n, n);
  nf.lambdaPlusBasis << CMatrix::Identity(n, n), s.aPlus;
  nf.lambdaMinusBasis = CMatrix(2 * n, n);
  nf.lambdaMinusBasis << CMatrix::Identity(n, n), s.aMinus;
  return nf;
}

NormalForm normal_form(const QuadraticSymbol& q, const CMatrix* gauge, double tol) {
  const SupersymmetricForm s = supersymmetric_decompose(q, tol);
  return normal_form(s, gauge);
}

}  // namespace qf
