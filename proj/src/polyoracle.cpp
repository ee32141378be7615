#include "quadfock/polyoracle.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace qf {

int degree(const MultiIndex& a) {
  int d = 0;
  for (int v : a) d += v;
  return d;
}

std::vector<MultiIndex> monomials(int n, int maxDegree) {
  std::vector<MultiIndex> out;
  MultiIndex a(n, 0);
  for (int d = 0; d <= maxDegree; ++d) {
    // odometer over compositions of d, first slot largest first
    std::vector<MultiIndex> level;
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == n - 1) {
        a[pos] = left;
        level.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::vector<int> GramTable::degree_range(int lo, int hi) const {
  std::vector<int> idx;
  for (int i = 0; i < size(); ++i) {
    const int d = degree(basis[i]);
    if (d >= lo && d <= hi) idx.push_back(i);
  }
  return idx;
}

namespace {

void check_degree(int maxDegree, const char* who) {
  if (maxDegree < 0) throw InputError(std::string(who) + ": negative degree");
  if (maxDegree > kMaxOracleDegree) {
    std::ostringstream os;
    os << who << ": degree " << maxDegree << " exceeds the guard " << kMaxOracleDegree;
    throw InputError(os.str());
  }
}

// Gaussian moments of y = (z_1..z_n, conj z_1..conj z_n), v ~ N(0, Sigma).
class IsserlisMemo {
 public:
  IsserlisMemo(const RMatrix& sigma, int n, int maxCount)
      : n_(n), base_(static_cast<std::uint64_t>(maxCount) + 1) {
    CMatrix ell = CMatrix::Zero(2 * n, 2 * n);  // column a = coefficients of y_a
    for (int k = 0; k < n; ++k) {
      ell(k, k) = 1.0;
      ell(n + k, k) = cplx(0, 1);
      ell(k, n + k) = 1.0;
      ell(n + k, n + k) = cplx(0, -1);
    }
    cov_ = ell.transpose() * sigma.cast<cplx>() * ell;
  }

  cplx moment(std::vector<int>& counts) {
    int total = 0;
    for (int c : counts) total += c;
    if (total == 0) return 1.0;
    if (total % 2 != 0) return 0.0;
    const std::uint64_t key = encode(counts);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int a = 0;
    while (counts[a] == 0) ++a;
    --counts[a];
    cplx s = 0.0;
    for (int b = 0; b < 2 * n_; ++b) {
      if (counts[b] == 0) continue;
      const double mult = counts[b];
      --counts[b];
      s += mult * cov_(a, b) * moment(counts);
      ++counts[b];
    }
    ++counts[a];
    memo_.emplace(key, s);
    return s;
  }

 private:
  std::uint64_t encode(const std::vector<int>& counts) const {
    std::uint64_t k = 0;
    for (int c : counts) k = k * base_ + static_cast<std::uint64_t>(c);
    return k;
  }

  int n_;
  std::uint64_t base_;
  CMatrix cov_;
  std::unordered_map<std::uint64_t, cplx> memo_;
};

double gaussian_mass(const RMatrix& H) {
  const int n = static_cast<int>(H.rows() / 2);
  return std::pow(std::numbers::pi, n) / std::sqrt(H.determinant());
}

CVector monomial_values(const std::vector<MultiIndex>& basis, const CVector& z) {
  CVector m(basis.size());
  for (size_t i = 0; i < basis.size(); ++i) {
    cplx v = 1.0;
    for (int k = 0; k < z.size(); ++k)
      for (int p = 0; p < basis[i][k]; ++p) v *= z(k);
    m(i) = v;
  }
  return m;
}

struct ScaledCholesky {
  RVector d;           // diag(G)^{-1/2}
  CMatrix upper;       // U with D G D = U* U
  CMatrix upperInv;
};

ScaledCholesky scaled_cholesky(const CMatrix& g) {
  ScaledCholesky s;
  s.d = g.diagonal().real().cwiseSqrt().cwiseInverse();
  const CMatrix gs = s.d.asDiagonal() * g * s.d.asDiagonal();
  Eigen::LLT<CMatrix> llt(0.5 * (gs + gs.adjoint()));
  if (llt.info() != Eigen::Success)
    throw NumericalError("gram matrix is not numerically positive definite");
  s.upper = llt.matrixU();
  s.upperInv = llt.matrixU().solve(CMatrix::Identity(g.rows(), g.cols()));
  return s;
}

CMatrix sub(const CMatrix& a, const std::vector<int>& idx) {
  CMatrix s(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) s(i, j) = a(idx[i], idx[j]);
  return s;
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

CMatrix normalized_operator(const CMatrix& gramEntries, const CMatrix& op,
                            const std::vector<int>& idx) {
  const ScaledCholesky s = scaled_cholesky(sub(gramEntries, idx));
  const CMatrix t = sub(op, idx);
  const RVector dinv = s.d.cwiseInverse();
  return s.upper * dinv.asDiagonal() * t * s.d.asDiagonal() * s.upperInv;
}

}  // namespace

GramTable gram(const Weight& w, int maxDegree) {
  check_degree(maxDegree, "gram");
  const int n = w.n();
  const RMatrix& H = w.hess().matrix();
  const RMatrix sigma = 0.5 * H.inverse();
  IsserlisMemo memo(0.5 * (sigma + sigma.transpose()), n, maxDegree);
  GramTable g;
  g.weight = w;
  g.maxDegree = maxDegree;
  g.basis = monomials(n, maxDegree);
  const double mass = gaussian_mass(H);
  const int N = g.size();
  g.entries = CMatrix(N, N);
  std::vector<int> counts(2 * n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j) {
      for (int k = 0; k < n; ++k) {
        counts[k] = g.basis[j][k];
        counts[n + k] = g.basis[i][k];
      }
      const cplx v = mass * memo.moment(counts);
      g.entries(i, j) = v;
      g.entries(j, i) = std::conj(v);
    }
  g.normalization =
      "dL = Lebesgue measure on R^{2n} in (Re z, Im z); entry(0,0) = int e^{-2 Phi} dL";
  return g;
}

MonteCarloGram gram_monte_carlo(const Weight& w, int maxDegree, long samples,
                                std::uint64_t seed) {
  check_degree(maxDegree, "gram_monte_carlo");
  if (samples < 2) throw InputError("gram_monte_carlo: need at least two samples");
  const int n = w.n();
  const RMatrix& H = w.hess().matrix();
  const RMatrix sigma = 0.5 * H.inverse();
  Eigen::LLT<RMatrix> llt(0.5 * (sigma + sigma.transpose()));
  const RMatrix L = llt.matrixL();
  const auto basis = monomials(n, maxDegree);
  const int N = static_cast<int>(basis.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gd;
  CMatrix sum = CMatrix::Zero(N, N);
  RMatrix sqRe = RMatrix::Zero(N, N), sqIm = RMatrix::Zero(N, N);
  RVector x(2 * n);
  for (long s = 0; s < samples; ++s) {
    for (int k = 0; k < 2 * n; ++k) x(k) = gd(rng);
    const CVector z = to_complex(L * x);
    const CVector m = monomial_values(basis, z);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const cplx v = m(j) * std::conj(m(i));
        sum(i, j) += v;
        sqRe(i, j) += v.real() * v.real();
        sqIm(i, j) += v.imag() * v.imag();
      }
  }
  const double mass = gaussian_mass(H);
  const double S = static_cast<double>(samples);
  MonteCarloGram out;
  out.mean = sum / S;
  out.stdError = RMatrix(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double vr = sqRe(i, j) / S - std::pow(out.mean(i, j).real(), 2);
      const double vi = sqIm(i, j) / S - std::pow(out.mean(i, j).imag(), 2);
      out.stdError(i, j) = mass * std::sqrt(std::max(vr, vi) / (S - 1));
    }
  out.mean *= mass;
  return out;
}

KernelCheck reproducing_kernel_check(const Weight& w, const CVector& z, int maxDegree) {
  if (z.size() != w.n()) throw InputError("reproducing_kernel_check: dimension mismatch");
  const GramTable g = gram(w, maxDegree);
  const CVector m = monomial_values(g.basis, z);
  const ScaledCholesky s = scaled_cholesky(g.entries);
  // m^T G^{-1} conj(m) = |U^{-T} D m|^2 with G^{-1} = D U^{-1} U^{-*} D
  const CVector b = s.upperInv.transpose() * (s.d.asDiagonal() * m);
  KernelCheck k;
  k.partialSum = b.squaredNorm();
  const double detP = std::real(w.herm().determinant());
  k.target = std::pow(std::numbers::pi, -w.n()) * detP * std::exp(2.0 * w(z));
  return k;
}

TruncatedOperator truncated_operator(const CMatrix& a, int maxDegree) {
  check_degree(maxDegree, "truncated_operator");
  require_square(a, "truncated_operator");
  const int n = static_cast<int>(a.rows());
  TruncatedOperator t;
  t.basis = monomials(n, maxDegree);
  const int N = static_cast<int>(t.basis.size());
  std::map<MultiIndex, int> where;
  for (int i = 0; i < N; ++i) where[t.basis[i]] = i;
  t.matrix = CMatrix::Zero(N, N);
  t.matrix(0, 0) = 1.0;
  for (int j = 1; j < N; ++j) {
    const MultiIndex& al = t.basis[j];
    int k = 0;
    while (al[k] == 0) ++k;
    MultiIndex be = al;
    --be[k];
    const int jb = where.at(be);
    // (Az)^alpha = (Az)_k (Az)^beta
    for (int i = 0; i < N; ++i) {
      const cplx c = t.matrix(i, jb);
      if (c == cplx(0.0)) continue;
      for (int l = 0; l < n; ++l) {
        MultiIndex ga = t.basis[i];
        ++ga[l];
        t.matrix(where.at(ga), j) += c * a(k, l);
      }
    }
  }
  return t;
}

double gram_operator_norm(const CMatrix& gramEntries, const CMatrix& op,
                          const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  const CMatrix x = normalized_operator(gramEntries, op, idx);
  Eigen::JacobiSVD<CMatrix> svd(x);
  return svd.singularValues()(0);
}

double truncated_norm(const NormalForm& nf, cplx tau, int maxDegree) {
  const GramTable g = gram(nf.weight, maxDegree);
  const TruncatedOperator t = truncated_operator(expm(nf.m, tau), maxDegree);
  return gram_operator_norm(g.entries, t.matrix, all_indices(g.size()));
}

double truncated_tail_norm(const NormalForm& nf, cplx tau, int N, int maxDegree) {
  if (N < 0 || maxDegree <= N) throw InputError("truncated_tail_norm: need 0 <= N < maxDegree");
  const GramTable g = gram(nf.weight, maxDegree);
  const TruncatedOperator t = truncated_operator(expm(nf.m, tau), maxDegree);
  return gram_operator_norm(g.entries, t.matrix, g.degree_range(N + 1, maxDegree));
}

double pi_norm(const Weight& w, int N, int maxDegree) {
  if (N < 0 || maxDegree < N) throw InputError("pi_norm: need 0 <= N <= maxDegree");
  const GramTable g = gram(w, maxDegree);
  CMatrix p = CMatrix::Zero(g.size(), g.size());
  for (int i : g.degree_range(0, N)) p(i, i) = 1.0;
  return gram_operator_norm(g.entries, p, all_indices(g.size()));
}

double change_of_vars_identity_check(const NormalForm& nf, cplx tau, int maxDegree,
                                     std::uint64_t seed) {
  const GramTable g1 = gram(nf.weight, maxDegree);
  const RMatrix Ri = realify(expm(nf.m, -tau));
  const RMatrix h2 = Ri.transpose() * nf.weight.hess().matrix() * Ri;
  const GramTable g2 = gram(Weight::from_hessian(0.5 * (h2 + h2.transpose())), maxDegree);
  const TruncatedOperator t = truncated_operator(expm(nf.m, tau), maxDegree);
  const double factor = std::exp(-std::real(tau * nf.m.trace()));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gd;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    CVector c(g1.size());
    for (int i = 0; i < c.size(); ++i) c(i) = cplx(gd(rng), gd(rng));
    const CVector tc = t.matrix * c;
    const double lhs = std::sqrt(std::real(tc.dot(g1.entries * tc)));
    const double rhs = factor * std::sqrt(std::real(c.dot(g2.entries * c)));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
  }
  return worst;
}

RVector truncated_singular_values(const NormalForm& nf, cplx tau, int maxDegree) {
  const GramTable g = gram(nf.weight, maxDegree);
  const TruncatedOperator t = truncated_operator(expm(nf.m, tau), maxDegree);
  Eigen::JacobiSVD<CMatrix> svd(normalized_operator(g.entries, t.matrix, all_indices(g.size())));
  return svd.singularValues();
}

}  // namespace qf
