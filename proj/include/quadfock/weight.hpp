#pragma once

#include <string>
#include <vector>

#include "quadfock/numkit.hpp"
#include "quadfock/symbol.hpp"

namespace qf {

struct NormalForm;

/// A real number or one of the two infinities.
struct ExtendedReal {
  enum class Kind { Finite, PlusInfinity, MinusInfinity };
  Kind kind = Kind::Finite;
  double value = 0.0;

  static ExtendedReal finite(double v) { return {Kind::Finite, v}; }
  static ExtendedReal plus_infinity() { return {Kind::PlusInfinity, 0.0}; }
  static ExtendedReal minus_infinity() { return {Kind::MinusInfinity, 0.0}; }
  bool is_finite() const { return kind == Kind::Finite; }
  std::string str() const;  // "inf", "-inf" or the number
};

/// Real quadratic form on C^n, f(z) = 1/2 v.hess.v with v = (Re z, Im z).
struct RealQForm {
  RealSymmetric hess;

  int n() const { return hess.dim() / 2; }
  double operator()(const CVector& z) const { return 0.5 * hess.quad(to_real(z)); }
  // z -> f(a z)
  RealQForm pullback(const CMatrix& a) const;
};

/// Strictly convex real quadratic weight on C^n.
class Weight {
 public:
  Weight() = default;
  static Weight from_hessian(const RMatrix& hess);
  // Phi(z) = 1/2 z*.herm.z + 1/2 Re(z.sym.z)
  static Weight from_complex(const CMatrix& herm, const CMatrix& sym);
  static Weight standard(int n);  // 1/2 |z|^2

  int n() const { return n_; }
  const RealSymmetric& hess() const { return form_.hess; }
  const RealQForm& form() const { return form_; }
  double operator()(const CVector& z) const { return form_(z); }
  CMatrix herm() const;  // G*G
  CMatrix sym() const;   // -hpp

 private:
  int n_ = 0;
  RealQForm form_;
};

// Hessian of 1/2 z*.herm.z + 1/2 Re(z.sym.z).
RMatrix complex_blocks_to_hessian(const CMatrix& herm, const CMatrix& sym);

struct Decomposition {
  CMatrix g;    // Hermitian positive definite, 1/2|Gz|^2 is the Hermitian part
  CMatrix hpp;  // h(z) = 1/2 z.hpp.z, pluriharmonic part is -Re h
  CMatrix bigH; // (G^{-1})^T hpp G^{-1}
};

Decomposition decompose(const Weight& w);
ExtendedReal delta_ceiling(const Weight& w);

struct ShiftedWeight {
  RealQForm form;
  bool strictlyConvex = false;
};

ShiftedWeight shifted_weight(const Weight& w, double delta);

RealQForm theta_form(const NormalForm& nf);
Index index_I(const NormalForm& nf, const CVector& z);

struct GlobalIndex {
  Index i0;
  std::vector<int> kernelChain;  // real dimensions of V_0, V_1, ...
};

GlobalIndex global_index(const NormalForm& nf);
double escape_coefficient(const NormalForm& nf, const CVector& z);
double k1_coefficient(const NormalForm& nf);

// 1/(2I+1)! * binom(2I, I)
double escape_prefactor(int I);

}  // namespace qf
