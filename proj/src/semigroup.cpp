#include "quadfock/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace qf {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Unbounded: return "Unbounded";
    case Verdict::Bounded: return "Bounded";
    case Verdict::Compact: return "Compact";
  }
  return "?";
}

char verdict_letter(Verdict v) {
  switch (v) {
    case Verdict::Unbounded: return 'U';
    case Verdict::Bounded: return 'B';
    case Verdict::Compact: return 'C';
  }
  return '?';
}

const char* to_string(LargeTauVerdict v) {
  switch (v) {
    case LargeTauVerdict::GuaranteedBoundedRegion: return "GuaranteedBoundedRegion";
    case LargeTauVerdict::GuaranteedUnboundedRegion: return "GuaranteedUnboundedRegion";
    case LargeTauVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(SharedGroundState s) {
  switch (s) {
    case SharedGroundState::Bounded: return "Bounded";
    case SharedGroundState::Unbounded: return "Unbounded";
    case SharedGroundState::NotApplicable: return "NotApplicable";
  }
  return "?";
}

namespace {

RealSymmetric floored(const RMatrix& a, const RMatrix& b) {
  RMatrix d = a - b;
  if (d.norm() <= kDifferenceNoiseFloor * (a.norm() + b.norm())) d.setZero();
  return RealSymmetric(d);
}

}  // namespace

RealSymmetric difference_hessian(const NormalForm& nf, cplx tau) {
  const RMatrix R = realify(expm(nf.m, -tau));
  const RMatrix& H = nf.weight.hess().matrix();
  return floored(R.transpose() * H * R, H);
}

namespace {

Verdict verdict_of(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return Verdict::Compact;
    case Definiteness::PositiveSemidefinite: return Verdict::Bounded;
    case Definiteness::Indefinite: return Verdict::Unbounded;
  }
  return Verdict::Unbounded;
}

RMatrix hermitian_part_hessian(const Weight& w) {
  return complex_blocks_to_hessian(w.herm(), CMatrix::Zero(w.n(), w.n()));
}

}  // namespace

Verdict classify_verdict(const NormalForm& nf, cplx tau, double psdTol) {
  return verdict_of(psd_classify(difference_hessian(nf, tau), psdTol));
}

ClassificationReport classify(const NormalForm& nf, cplx tau, const Tolerances& tol) {
  ClassificationReport r;
  r.tau = tau;
  r.tolerances = tol;
  const PsdDetail d = psd_inspect(difference_hessian(nf, tau), tol.psd);
  r.verdict = verdict_of(d.cls);
  r.lambdaMin = d.lambdaMin;
  if (r.verdict == Verdict::Unbounded) r.witness = to_complex(d.minVector);
  r.normBound = std::exp(-std::real(tau * nf.m.trace()));
  r.delta0 = delta0(nf, tau, tol);
  return r;
}

ExtendedReal delta0(const NormalForm& nf, cplx tau, const Tolerances& tol) {
  const RMatrix R = realify(expm(nf.m, -tau));
  const RMatrix& H = nf.weight.hess().matrix();
  const RMatrix RtHR = R.transpose() * H * R;
  const RMatrix Rt_HP_R = R.transpose() * hermitian_part_hessian(nf.weight) * R;
  auto holds = [&](double d) {
    const RMatrix lhs = RtHR + (std::exp(-2.0 * d) - 1.0) * Rt_HP_R;
    return psd_classify(floored(lhs, H), tol.psd) != Definiteness::Indefinite;
  };

  const Decomposition dec = decompose(nf.weight);
  const CMatrix conj = dec.g * expm(nf.m, tau) * dec.g.inverse();
  const double upper = -std::log(spectral_norm(conj));
  if (!std::isfinite(upper)) throw NumericalError("delta0: upper bracket is not finite");
  if (holds(upper)) return ExtendedReal::finite(upper);

  double step = 1.0, lo = upper - step;
  int doublings = 0;
  while (!holds(lo)) {
    if (++doublings > kMaxBracketDoublings)
      throw NumericalError("delta0: bracketing failed after 60 doublings");
    step *= 2.0;
    lo = upper - step;
  }
  double hi = lo + step;  // hi fails: either upper, or the previous lo
  if (hi > upper) hi = upper;
  while (hi - lo > tol.bisect) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) lo = mid;
    else hi = mid;
  }
  return ExtendedReal::finite(lo);
}

double small_time_slope(const NormalForm& nf) {
  const RealQForm theta = theta_form(nf);
  if (psd_classify(theta.hess, kDefaultPsdTol) == Definiteness::Indefinite)
    throw HypothesisError("small_time_slope: Theta is indefinite");
  Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> ges(
      0.5 * theta.hess.matrix(), hermitian_part_hessian(nf.weight), Eigen::EigenvaluesOnly);
  return ges.eigenvalues()(0);
}

SmallTimeOrder small_time_order(const NormalForm& nf, const Tolerances& tol) {
  SmallTimeOrder out;
  const GlobalIndex gi = global_index(nf);
  if (!gi.i0) return out;
  const int i0 = *gi.i0;
  const int p = 2 * i0 + 1;
  out.order = p;
  out.upperC = k1_coefficient(nf) / std::pow(4.0, i0);

  Tolerances tight = tol;
  tight.bisect = std::min(tol.bisect, 1e-13);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double t = 1e-2 * std::pow(10.0, k / 9.0);
    const ExtendedReal d = delta0(nf, cplx(-t, 0.0), tight);
    if (!d.is_finite() || d.value < 1e3 * tight.bisect) continue;
    const double tp = std::pow(t, p);
    num += d.value * tp;
    den += tp * tp;
  }
  if (den > 0) out.lowerC = num / den;
  return out;
}

namespace {

void enumerate_alpha(int n, int maxDegree, std::vector<std::vector<int>>& out) {
  std::vector<int> a(n, 0);
  for (int d = 0; d <= maxDegree; ++d) {
    // all compositions of d into n parts, lexicographically descending
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == n - 1) {
        a[pos] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, d);
  }
}

}  // namespace

std::vector<LatticePoint> eigenvalue_lattice(const NormalForm& nf, int maxDegree,
                                             double clusterTol) {
  if (maxDegree < 0) throw InputError("eigenvalue_lattice: maxDegree must be >= 0");
  const JordanProbe jp = jordan_probe(nf.m, clusterTol);
  std::vector<cplx> lam;
  std::vector<std::optional<int>> rt;  // r~_j
  for (const auto& c : jp.eigenvalues) {
    const bool single = c.maxBlockSize == 1 || c.maxBlockSize == c.multiplicity;
    for (int k = 0; k < c.multiplicity; ++k) {
      lam.push_back(c.value);
      if (c.maxBlockSize == 1) rt.push_back(0);
      else if (single) rt.push_back(k);
      else rt.push_back(std::nullopt);
    }
  }
  std::vector<std::vector<int>> alphas;
  enumerate_alpha(nf.n(), maxDegree, alphas);
  std::vector<LatticePoint> out;
  out.reserve(alphas.size());
  for (const auto& a : alphas) {
    LatticePoint p;
    p.alpha = a;
    p.lambda = 0.0;
    int order = 1;
    bool known = true;
    for (size_t j = 0; j < a.size(); ++j) {
      p.lambda += static_cast<double>(a[j]) * lam[j];
      if (a[j] == 0) continue;
      if (rt[j]) order += *rt[j] * a[j];
      else known = false;
    }
    if (known) p.order = order;
    out.push_back(std::move(p));
  }
  return out;
}

double ReturnRates::rate(double t) const { return std::pow(t, bigR - 1) * std::exp(-rho * t); }

ReturnRates return_rates(const NormalForm& nf, double clusterTol) {
  const JordanProbe jp = jordan_probe(nf.m, clusterTol);
  const double cut = std::max(clusterTol * spectral_norm(nf.m), kClusterFloor);
  ReturnRates r;
  r.rho = jp.eigenvalues.front().value.real();
  for (const auto& c : jp.eigenvalues) r.rho = std::min(r.rho, c.value.real());
  r.bigR = 1;
  for (const auto& c : jp.eigenvalues)
    if (std::abs(c.value.real() - r.rho) <= cut) r.bigR = std::max(r.bigR, c.maxBlockSize);
  int top = 0;
  for (const auto& c : jp.eigenvalues)
    if (std::abs(c.value.real() - r.rho) <= cut && c.maxBlockSize == r.bigR) ++top;
  r.weakLimitExists = top == 1;

  bool right = true;
  for (const auto& c : jp.eigenvalues)
    if (!(c.value.real() > cut)) right = false;
  if (!right) {
    r.note = "spectrum not contained in {Re lambda > 0}: theta and b fields omitted";
    return r;
  }
  double tp = -10, tm = 10;
  for (const auto& c : jp.eigenvalues) {
    tp = std::max(tp, std::arg(c.value));
    tm = std::min(tm, std::arg(c.value));
  }
  double bp = 0, bm = 0;
  bool seenP = false, seenM = false;
  for (const auto& c : jp.eigenvalues) {
    const double th = std::arg(c.value), rj = std::abs(c.value);
    const double b = (c.maxBlockSize - 1) / rj;
    if (std::abs(th - tp) <= 1e-9) bp = seenP ? std::max(bp, b) : b, seenP = true;
    if (std::abs(th - tm) <= 1e-9) bm = seenM ? std::max(bm, b) : b, seenM = true;
  }
  r.thetaPlus = tp;
  r.thetaMinus = tm;
  r.bPlus = bp;
  r.bMinus = bm;
  return r;
}

ReturnBound return_bound(const NormalForm& nf, double t, int N, const Tolerances& tol) {
  if (N < 0) throw InputError("return_bound: N must be >= 0");
  if (classify_verdict(nf, cplx(-t, 0.0), tol.psd) == Verdict::Unbounded)
    throw HypothesisError("return_bound: exp(-tP) is unbounded at this t");
  const ReturnRates rr = return_rates(nf, tol.cluster);
  const Decomposition dec = decompose(nf.weight);
  const CMatrix conj = dec.g * expm(nf.m, cplx(-t, 0.0)) * dec.g.inverse();
  ReturnBound b;
  b.lower = std::pow(rr.rate(t), N + 1);
  b.upper = std::pow(spectral_norm(conj), N + 1);
  if (spectral_norm(dec.hpp) <= 1e-12 * std::max(1.0, spectral_norm(CMatrix(dec.g * dec.g))))
    b.exact = b.upper;
  return b;
}

double GridSpec::re(int i) const {
  return reCount == 1 ? reMin : reMin + (reMax - reMin) * i / (reCount - 1);
}

double GridSpec::im(int j) const {
  return imCount == 1 ? imMin : imMin + (imMax - imMin) * j / (imCount - 1);
}

RegionGrid region_scan(const NormalForm& nf, const GridSpec& grid, const Tolerances& tol,
                       int threads, bool withDelta0) {
  if (grid.reCount < 1 || grid.imCount < 1) throw InputError("region_scan: counts must be >= 1");
  RegionGrid out;
  out.grid = grid;
  out.tolerances = tol;
  out.cells.resize(static_cast<size_t>(grid.reCount) * grid.imCount);
  auto work = [&](int j) {
    for (int i = 0; i < grid.reCount; ++i) {
      const cplx tau(grid.re(i), grid.im(j));
      ClassificationReport r;
      if (withDelta0) {
        r = classify(nf, tau, tol);
      } else {
        r.tau = tau;
        r.tolerances = tol;
        r.verdict = classify_verdict(nf, tau, tol.psd);
        r.normBound = std::exp(-std::real(tau * nf.m.trace()));
        r.delta0 = ExtendedReal::finite(std::nan(""));
      }
      out.cells[static_cast<size_t>(j) * grid.reCount + i] = std::move(r);
    }
  };
  int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::clamp(nt, 1, grid.imCount);
  if (nt == 1) {
    for (int j = 0; j < grid.imCount; ++j) work(j);
    return out;
  }
  std::vector<std::thread> pool;
  for (int k = 0; k < nt; ++k)
    pool.emplace_back([&, k] {
      for (int j = k; j < grid.imCount; j += nt) work(j);
    });
  for (auto& th : pool) th.join();
  return out;
}

std::vector<double> transition_times(const NormalForm& nf, double angle, double tMax,
                                     const Tolerances& tol, int samples, double timeTol) {
  if (!(tMax > 0) || samples < 2) throw InputError("transition_times: bad range");
  const cplx dir = std::polar(1.0, angle);
  auto v = [&](double t) { return classify_verdict(nf, t * dir, tol.psd); };
  std::vector<double> out;
  double tPrev = tMax / samples;
  Verdict vPrev = v(tPrev);
  for (int k = 2; k <= samples; ++k) {
    const double t = tMax * k / samples;
    const Verdict vc = v(t);
    if (vc != vPrev) {
      double lo = tPrev, hi = t;
      while (hi - lo > timeTol) {
        const double mid = 0.5 * (lo + hi);
        if (v(mid) == vPrev) lo = mid;
        else hi = mid;
      }
      const double tc = 0.5 * (lo + hi);
      if (out.empty() || tc - out.back() > 1e-4) out.push_back(tc);
    }
    tPrev = t;
    vPrev = vc;
  }
  return out;
}

SphereConstants sphere_constants(const Weight& w, double delta) {
  Eigen::SelfAdjointEigenSolver<RMatrix> e0(w.hess().matrix(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<RMatrix> e1(shifted_weight(w, delta).form.hess.matrix(),
                                            Eigen::EigenvaluesOnly);
  const auto& a = e0.eigenvalues();
  const auto& b = e1.eigenvalues();
  SphereConstants c;
  c.c0 = std::sqrt(a(0) / b(b.size() - 1));
  c.c1 = std::sqrt(a(a.size() - 1) / b(0));
  return c;
}

LargeTauVerdict large_tau_verdict(const NormalForm& nf, cplx tau) {
  Eigen::ComplexEigenSolver<CMatrix> ces(nf.m, false);
  for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i)
    if (!(ces.eigenvalues()(i).real() > 0))
      throw HypothesisError("large_tau_verdict: spectrum of M not in {Re lambda > 0}");
  const SphereConstants c = sphere_constants(nf.weight, 0.0);
  const double nrm = spectral_norm(expm(nf.m, tau));
  if (nrm <= (1.0 / c.c1) * (1.0 - 1e-9)) return LargeTauVerdict::GuaranteedBoundedRegion;
  if (nrm > (1.0 / c.c0) * (1.0 + 1e-9)) return LargeTauVerdict::GuaranteedUnboundedRegion;
  return LargeTauVerdict::Inconclusive;
}

Verdict linear_extension_classify(const NormalForm& nf, const CVector& a, const CVector& b,
                                  cplx tau, double psdTol) {
  const int n = nf.n();
  if (a.size() != n || b.size() != n) throw InputError("linear_extension_classify: dimension");
  Eigen::FullPivLU<CMatrix> lu(nf.m);
  if (!lu.isInvertible()) throw HypothesisError("linear_extension_classify: M is singular");
  const CVector c = lu.solve(b);
  const CVector u = nf.m.transpose().fullPivLu().solve(a);
  const RMatrix& H = nf.weight.hess().matrix();
  // linear part of Phi(z - c) + Re(u.z) in real coordinates
  RVector g = -H * to_real(c);
  g.head(n) += u.real();
  g.tail(n) -= u.imag();
  const RMatrix R = realify(expm(nf.m, -tau));
  const RVector ell = R.transpose() * g - g;

  const RealSymmetric Q = floored(R.transpose() * H * R, H);
  const PsdDetail d = psd_inspect(Q, psdTol);
  if (d.cls == Definiteness::Indefinite) return Verdict::Unbounded;
  if (d.cls == Definiteness::PositiveDefinite) return Verdict::Compact;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(Q.matrix());
  const double cut = psdTol * d.scale;
  const double ref = std::max({g.norm() * (R.norm() + 1.0), 1e-300});
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (std::abs(es.eigenvalues()(k)) > cut) continue;
    if (std::abs(es.eigenvectors().col(k).dot(ell)) > 1e-8 * ref) return Verdict::Unbounded;
  }
  return Verdict::Bounded;
}

namespace {

CMatrix column_space(const CMatrix& a, double rel) {
  if (a.cols() == 0) return CMatrix(a.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU);
  const RVector& s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(0) > 0 && s(i) > rel * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

CMatrix null_space(const CMatrix& a, double rel) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(0) > 0 && s(i) > rel * s(0)) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

}  // namespace

ImaginarySplit imaginary_split(const NormalForm& nf, double clusterTol) {
  if (psd_classify(theta_form(nf).hess, kDefaultPsdTol) == Definiteness::Indefinite)
    throw HypothesisError("imaginary_split: Theta is indefinite");
  const int n = nf.n();
  const double mn = std::max(spectral_norm(nf.m), 1e-300);
  const double cut = std::max(clusterTol * mn, kClusterFloor);
  const JordanProbe jp = jordan_probe(nf.m, clusterTol);
  ImaginarySplit out;
  const CMatrix I = CMatrix::Identity(n, n);
  CMatrix V(n, 0);
  CMatrix prod = I;
  for (const auto& c : jp.eigenvalues) {
    if (std::abs(c.value.real()) > cut) continue;
    out.hasImaginary = true;
    CMatrix P = I;
    for (int k = 0; k < c.multiplicity; ++k) P = P * (nf.m - c.value * I) / mn;
    const CMatrix ker = null_space(P, 1e-10);
    CMatrix nv(n, V.cols() + ker.cols());
    nv << V, ker;
    V = nv;
    prod = prod * P;
  }
  if (!out.hasImaginary) return out;
  const CMatrix W = column_space(prod, 1e-10);
  out.vBasis = V;
  out.wBasis = W;

  const Decomposition dec = decompose(nf.weight);
  const CMatrix gi = dec.g.inverse();
  const CMatrix GV = column_space(dec.g * V, 1e-12);
  const CMatrix GW = column_space(dec.g * W, 1e-12);
  out.orthogonalVerified = W.cols() == 0 || (GV.adjoint() * GW).norm() <= 1e-8;

  const CMatrix A = dec.g * nf.m * gi;
  const CMatrix K = GV.adjoint() * A * GV;
  const double inv = (A * GV - GV * K).norm();
  out.skewVerified = inv <= 1e-8 * mn && (K + K.adjoint()).norm() <= 1e-8 * mn;

  // pi_W: projection onto W along V
  CMatrix basis(n, V.cols() + W.cols());
  basis << V, W;
  bool ok = basis.cols() == n;
  if (ok) {
    const Eigen::FullPivLU<CMatrix> lu(basis);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gd;
    const double hn = std::max(spectral_norm(dec.hpp), 1e-300);
    for (int trial = 0; trial < 10 && ok; ++trial) {
      CVector z(n);
      for (int j = 0; j < n; ++j) z(j) = cplx(gd(rng), gd(rng));
      const CVector coef = lu.solve(z);
      const CVector zw = W * coef.tail(W.cols());
      const CVector mz = nf.m * z;
      const cplx lhs = (mz.transpose() * dec.hpp * z)(0);
      const cplx rhs = (mz.transpose() * dec.hpp * zw)(0);
      if (std::abs(lhs - rhs) > 1e-8 * mn * hn * z.squaredNorm()) ok = false;
    }
  }
  out.hCancellationVerified = ok;
  return out;
}

SharedGroundState shared_ground_state_criterion(const QuadraticSymbol& q1,
                                                const QuadraticSymbol& q2, double delta1,
                                                double delta2) {
  for (const QuadraticSymbol* q : {&q1, &q2}) {
    const CMatrix Q = q->matrix();
    if (Q.imag().norm() > 1e-12 * std::max(Q.norm(), 1e-300))
      throw HypothesisError("shared_ground_state_criterion: symbols must be real-valued");
    if (psd_classify(RealSymmetric(Q.real()), 1e-10) != Definiteness::PositiveDefinite)
      throw HypothesisError("shared_ground_state_criterion: symbols must be positive definite");
  }
  if (q1.n != q2.n) throw InputError("shared_ground_state_criterion: dimension mismatch");
  const SupersymmetricForm s1 = supersymmetric_decompose(q1);
  const SupersymmetricForm s2 = supersymmetric_decompose(q2);
  const double scale = std::max(s1.aPlus.norm(), 1.0);
  if ((s1.aPlus - s2.aPlus).norm() > 1e-8 * scale) return SharedGroundState::NotApplicable;
  const NormalForm n1 = normal_form(s1), n2 = normal_form(s2);
  const Decomposition dec = decompose(n1.weight);
  const CMatrix gi = dec.g.inverse();
  const CMatrix b1 = dec.g * n1.m * gi, b2 = dec.g * n2.m * gi;
  const double nrm = spectral_norm(CMatrix(expm(b2, delta2) * expm(b1, -delta1)));
  return nrm <= 1.0 + 1e-10 ? SharedGroundState::Bounded : SharedGroundState::Unbounded;
}

}  // namespace qf
