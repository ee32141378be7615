#include "quadfock/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qf {

RealSymmetric::RealSymmetric(const RMatrix& m) : m_(m) {
  if (m.rows() != m.cols()) throw InputError("RealSymmetric: matrix is not square");
  for (int i = 0; i < m_.rows(); ++i)
    for (int j = 0; j < i; ++j) m_(i, j) = m_(j, i);
  if (!m_.allFinite()) throw InputError("RealSymmetric: non-finite entry");
}

const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::PositiveSemidefinite: return "PositiveSemidefinite";
    case Definiteness::Indefinite: return "Indefinite";
  }
  return "?";
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw InputError(std::string(what) + ": expected a non-empty square matrix");
}

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double spectral_norm(const RMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMatrix> svd(a);
  return svd.singularValues()(0);
}

RMatrix realify(const CMatrix& a) {
  const int r = static_cast<int>(a.rows()), c = static_cast<int>(a.cols());
  RMatrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = a.real();
  out.topRightCorner(r, c) = -a.imag();
  out.bottomLeftCorner(r, c) = a.imag();
  out.bottomRightCorner(r, c) = a.real();
  return out;
}

RVector to_real(const CVector& z) {
  RVector v(2 * z.size());
  v.head(z.size()) = z.real();
  v.tail(z.size()) = z.imag();
  return v;
}

CVector to_complex(const RVector& v) {
  const Eigen::Index n = v.size() / 2;
  CVector z(n);
  for (Eigen::Index j = 0; j < n; ++j) z(j) = cplx(v(j), v(n + j));
  return z;
}

RMatrix real_kernel(const RMatrix& a, double relCut) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) return RMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  if (smax == 0.0) return RMatrix::Identity(cols, cols);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > relCut * smax) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

int numerical_rank(const CMatrix& a, double absCut) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  const RVector& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > absCut) ++r;
  return r;
}

// ---------------------------------------------------------------- expm

namespace {

constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

CMatrix expm(const CMatrix& m, cplx tau) {
  require_square(m, "expm");
  require_finite(m, "expm");
  const Eigen::Index n = m.rows();
  const CMatrix I = CMatrix::Identity(n, n);
  if (tau == cplx(0.0)) return I;

  CMatrix A = tau * m;
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) throw NumericalError("expm: non-finite argument");
  int s = 0;
  if (norm1 > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  if (s > 1000) throw NumericalError("expm: argument too large to represent");
  A /= std::ldexp(1.0, s);

  const CMatrix A2 = A * A;
  const CMatrix A4 = A2 * A2;
  const CMatrix A6 = A4 * A2;
  const double* b = kPade13;
  CMatrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
                   b[3] * A2 + b[1] * I);
  CMatrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 +
              b[0] * I;
  CMatrix R = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < s; ++k) R = R * R;
  if (!R.allFinite()) throw NumericalError("expm: overflow (result not representable)");
  return R;
}

double contraction_defect(const CMatrix& m, double t) {
  require_square(m, "contraction_defect");
  using lc = std::complex<long double>;
  using LMatrix = Eigen::Matrix<lc, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = m.rows();
  LMatrix A = (-t * m).cast<lc>();
  long double nrm = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    long double c = 0;
    for (Eigen::Index i = 0; i < n; ++i) c += std::abs(A(i, j));
    nrm = std::max(nrm, c);
  }
  int s = 0;
  while (nrm > 0.25L) {
    nrm /= 2;
    ++s;
  }
  A /= std::ldexp(1.0L, s);
  // D = e^A - I by its series, then D_{2h} = 2 D_h + D_h^2.
  LMatrix D = LMatrix::Zero(n, n);
  LMatrix term = LMatrix::Identity(n, n);
  for (int k = 1; k < 40; ++k) {
    term = term * A / static_cast<long double>(k);
    D += term;
    long double tn = 0;
    for (Eigen::Index i = 0; i < term.size(); ++i) tn = std::max(tn, std::abs(term(i)));
    if (tn < 1e-30L) break;
  }
  for (int k = 0; k < s; ++k) D = 2.0L * D + D * D;
  LMatrix K = D.adjoint() + D + D.adjoint() * D;
  Eigen::SelfAdjointEigenSolver<LMatrix> es(K, Eigen::EigenvaluesOnly);
  const long double lam = es.eigenvalues()(n - 1);
  const long double defect = -lam / (1.0L + std::sqrt(1.0L + lam));
  return static_cast<double>(defect);
}

// ---------------------------------------------------------------- PSD

PsdDetail psd_inspect(const RealSymmetric& s, double relTol) {
  if (!(relTol > 0)) throw InputError("psd_classify: relTol must be positive");
  PsdDetail d;
  const int n = s.dim();
  if (n == 0) return d;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(s.matrix());
  const RVector& ev = es.eigenvalues();
  d.lambdaMin = ev(0);
  d.scale = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  d.minVector = es.eigenvectors().col(0);
  if (d.scale == 0.0) {
    d.cls = Definiteness::PositiveSemidefinite;
  } else if (d.lambdaMin > relTol * d.scale) {
    d.cls = Definiteness::PositiveDefinite;
  } else if (d.lambdaMin < -relTol * d.scale) {
    d.cls = Definiteness::Indefinite;
  } else {
    d.cls = Definiteness::PositiveSemidefinite;
  }
  return d;
}

Definiteness psd_classify(const RealSymmetric& s, double relTol) {
  return psd_inspect(s, relTol).cls;
}

// ---------------------------------------------------------------- sqrt

CMatrix herm_sqrt(const CMatrix& p) {
  require_square(p, "herm_sqrt");
  require_finite(p, "herm_sqrt");
  const double nrm = std::max(spectral_norm(p), 1e-300);
  if ((p - p.adjoint()).norm() > 1e-10 * nrm) throw InputError("herm_sqrt: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (p + p.adjoint()));
  RVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-12 * nrm) {
      std::ostringstream os;
      os << "herm_sqrt: input not positive semidefinite (eigenvalue " << ev(i) << ")";
      throw HypothesisError(os.str());
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------- Takagi

TakagiResult takagi(const CMatrix& sym) {
  require_square(sym, "takagi");
  require_finite(sym, "takagi");
  const Eigen::Index n = sym.rows();
  const double nrm = spectral_norm(sym);
  if ((sym - sym.transpose()).norm() > 1e-12 * std::max(nrm, 1.0))
    throw InputError("takagi: input is not complex symmetric");

  // (x, y) eigenvector of [[Re A, Im A], [Im A, -Re A]] for sigma > 0 gives
  // a Takagi vector w = x + i y with A conj(w) = sigma w.
  RMatrix H(2 * n, 2 * n);
  H << sym.real(), sym.imag(), sym.imag(), -sym.real();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
  const RVector& ev = es.eigenvalues();
  const double cut = 1e-13 * std::max(nrm, 1e-300);

  TakagiResult out;
  out.unitary = CMatrix::Zero(n, n);
  Eigen::Index r = 0;
  for (Eigen::Index k = 2 * n - 1; k >= 0 && r < n; --k) {
    if (ev(k) <= cut) break;
    const RVector v = es.eigenvectors().col(k);
    CVector w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = cplx(v(j), v(n + j));
    out.unitary.col(r) = w / w.norm();
    out.sigma.push_back(ev(k));
    ++r;
  }
  if (r < n) {
    // Complete to a unitary; the remaining singular values are zero.
    CMatrix aug(n, r + n);
    aug.leftCols(r) = out.unitary.leftCols(r);
    aug.rightCols(n) = CMatrix::Identity(n, n);
    Eigen::HouseholderQR<CMatrix> qr(aug);
    CMatrix Q = qr.householderQ() * CMatrix::Identity(n, n);
    for (Eigen::Index k = r; k < n; ++k) {
      out.unitary.col(k) = Q.col(k);
      out.sigma.push_back(0.0);
    }
  }
  return out;
}

// ---------------------------------------------------------------- Jordan

int JordanProbe::dimension() const {
  int d = 0;
  for (const auto& c : eigenvalues) d += c.multiplicity;
  return d;
}

namespace {

CMatrix shifted_power(const CMatrix& m, cplx mu, int k) {
  const CMatrix S = m - mu * CMatrix::Identity(m.rows(), m.cols());
  CMatrix P = S;
  for (int i = 1; i < k; ++i) P = P * S;
  return P;
}

int nullity_of_power(const CMatrix& m, cplx mu, int k, double scale, double rel) {
  const CMatrix P = shifted_power(m, mu, k);
  return static_cast<int>(m.rows()) - numerical_rank(P, rel * std::pow(scale, k));
}

}  // namespace

JordanProbe jordan_probe(const CMatrix& m, double tol) {
  require_square(m, "jordan_probe");
  require_finite(m, "jordan_probe");
  if (!(tol > 0)) throw InputError("jordan_probe: tol must be positive");
  const int n = static_cast<int>(m.rows());
  const double nrm = spectral_norm(m);
  const double scale = std::max(nrm, 1e-300);
  const double cut = std::max(tol * nrm, kClusterFloor);

  Eigen::ComplexEigenSolver<CMatrix> ces(m, false);
  const CVector lam = ces.eigenvalues();

  JordanProbe out;
  out.tolerance = tol;

  // single-link clustering at the tolerance
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(lam(i) - lam(j));
      if (d <= cut) {
        parent[find(i)] = find(j);
      } else if (d <= 10 * cut) {
        std::ostringstream os;
        os << "eigenvalues " << lam(i) << " and " << lam(j)
           << " lie between tol and 10*tol apart; clustering is ill-conditioned";
        out.warnings.push_back(os.str());
      }
    }

  auto groups = [&] {
    std::vector<std::vector<int>> g;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
      const int r = find(i);
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(g.size());
        g.emplace_back();
      }
      g[slot[r]].push_back(i);
    }
    return g;
  };
  auto mean_of = [&](const std::vector<int>& idx) {
    cplx s = 0;
    for (int i : idx) s += lam(i);
    return s / static_cast<double>(idx.size());
  };

  // A defective eigenvalue of multiplicity s splits by about eps^{1/s}.
  // Merge nearby clusters when the rank test confirms a single eigenvalue.
  const double mergeRadius = 1e-3 * scale;
  bool merged = true;
  while (merged) {
    merged = false;
    auto g = groups();
    // whole neighbourhoods first: a block of size s > 2 never passes pairwise
    {
      std::vector<int> comp(g.size());
      std::iota(comp.begin(), comp.end(), 0);
      auto root = [&](int i) {
        while (comp[i] != i) i = comp[i] = comp[comp[i]];
        return i;
      };
      for (size_t a = 0; a < g.size(); ++a)
        for (size_t b = a + 1; b < g.size(); ++b)
          if (std::abs(mean_of(g[a]) - mean_of(g[b])) <= mergeRadius) comp[root(a)] = root(b);
      for (size_t a = 0; a < g.size() && !merged; ++a) {
        std::vector<int> u, members;
        for (size_t b = 0; b < g.size(); ++b)
          if (root(b) == root(a)) {
            members.push_back(static_cast<int>(b));
            u.insert(u.end(), g[b].begin(), g[b].end());
          }
        if (members.size() < 3 || members.front() != static_cast<int>(a)) continue;
        const int s = static_cast<int>(u.size());
        if (nullity_of_power(m, mean_of(u), s, scale, 1e-12) >= s) {
          for (int b : members) parent[find(g[b][0])] = find(g[a][0]);
          merged = true;
          out.warnings.push_back("merged a split defective eigenvalue cluster");
        }
      }
    }
    if (merged) continue;
    double best = mergeRadius;
    int bi = -1, bj = -1;
    for (size_t a = 0; a < g.size(); ++a)
      for (size_t b = a + 1; b < g.size(); ++b) {
        const double d = std::abs(mean_of(g[a]) - mean_of(g[b]));
        if (d > cut && d <= best) {
          std::vector<int> u = g[a];
          u.insert(u.end(), g[b].begin(), g[b].end());
          const int s = static_cast<int>(u.size());
          if (nullity_of_power(m, mean_of(u), s, scale, 1e-12) >= s) {
            best = d;
            bi = g[a][0];
            bj = g[b][0];
          }
        }
      }
    if (bi >= 0) {
      parent[find(bi)] = find(bj);
      merged = true;
      out.warnings.push_back("merged a split defective eigenvalue cluster");
    }
  }

  for (const auto& idx : groups()) {
    JordanCluster c;
    c.value = mean_of(idx);
    c.multiplicity = static_cast<int>(idx.size());
    c.maxBlockSize = c.multiplicity;
    for (int k = 1; k <= c.multiplicity; ++k) {
      if (nullity_of_power(m, c.value, k, scale, kRankCutoff) >= c.multiplicity) {
        c.maxBlockSize = k;
        break;
      }
    }
    out.eigenvalues.push_back(c);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const JordanCluster& a, const JordanCluster& b) {
              if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });
  return out;
}

}  // namespace qf
