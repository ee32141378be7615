#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "quadfock/numkit.hpp"
#include "quadfock/reduction.hpp"
#include "quadfock/symbol.hpp"
#include "quadfock/weight.hpp"

namespace fx {

using namespace qf;

inline CMatrix fp_matrix(double a, double b) {
  CMatrix m(2, 2);
  m << b, -a, a, 1;
  return m;
}

// q = b/2 (x1^2 + xi1^2) + 1/2 (x2^2 + xi2^2) - i a (x1 xi2 - x2 xi1)
inline QuadraticSymbol fp_symbol(double a, double b) {
  CMatrix qxx = CMatrix::Zero(2, 2), qxxi = CMatrix::Zero(2, 2);
  qxx(0, 0) = b / 2;
  qxx(1, 1) = 0.5;
  qxxi(0, 1) = cplx(0, -a / 2);
  qxxi(1, 0) = cplx(0, a / 2);
  return QuadraticSymbol::make(qxx, qxxi, qxx);
}

// 1/2 (xi^2 + e^{2 i theta} x^2)
inline QuadraticSymbol rho_symbol(double theta) {
  CMatrix qxx(1, 1), qxxi = CMatrix::Zero(1, 1), qxixi(1, 1);
  qxx(0, 0) = 0.5 * std::polar(1.0, 2 * theta);
  qxixi(0, 0) = 0.5;
  return QuadraticSymbol::make(qxx, qxxi, qxixi);
}

inline NormalForm rho_normal_form(double theta) {
  CMatrix m(1, 1), herm(1, 1), sym(1, 1);
  m(0, 0) = std::polar(1.0, theta);
  herm(0, 0) = 1.0;
  sym(0, 0) = -std::sin(theta);
  return NormalForm::direct(m, Weight::from_complex(herm, sym));
}

inline NormalForm standard_normal_form(const CMatrix& m) {
  return NormalForm::direct(m, Weight::standard(static_cast<int>(m.rows())));
}

inline CMatrix subell_matrix(double a, double b) {
  CMatrix m(3, 3);
  m << 0, -b, 0, b, 0, -a, 0, a, 1;
  return m;
}

inline CMatrix random_complex(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  CMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = scale * cplx(g(rng), g(rng));
  return a;
}

inline RMatrix random_real(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  RMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = scale * g(rng);
  return a;
}

// Random strictly convex weight 1/2 |G z|^2 - Re(1/2 z.hpp.z) with ||G^{-T} hpp G^{-1}|| = rho < 1.
inline Weight random_weight(int n, std::mt19937_64& rng, double rho) {
  CMatrix g = random_complex(n, n, rng, 0.3) + CMatrix::Identity(n, n);
  const CMatrix p = g.adjoint() * g;
  const CMatrix gs = herm_sqrt(p);
  CMatrix s = random_complex(n, n, rng);
  s = 0.5 * (s + s.transpose()).eval();
  s *= rho / std::max(spectral_norm(s), 1e-300);
  // hpp = gs^T s gs so that the ceiling matrix is s
  const CMatrix hpp = gs.transpose() * s * gs;
  return Weight::from_complex(p, -hpp);
}

// Random real symplectic map exp(J S), S symmetric.
inline RMatrix random_symplectic(int n, std::mt19937_64& rng, double scale) {
  RMatrix s = random_real(2 * n, 2 * n, rng, scale);
  s = 0.5 * (s + s.transpose()).eval();
  const RMatrix js = symplectic_j(n) * s;
  return expm(js.cast<cplx>(), 1.0).real();
}

}  // namespace fx
