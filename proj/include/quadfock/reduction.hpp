#pragma once

#include <string>
#include <vector>

#include "quadfock/numkit.hpp"
#include "quadfock/symbol.hpp"
#include "quadfock/weight.hpp"

namespace qf {

struct StablePlanes {
  CMatrix plus;   // 2n x n orthonormal basis, Im(lambda) > 0
  CMatrix minus;  // 2n x n orthonormal basis, Im(lambda) < 0
};

StablePlanes stable_planes(const FundamentalMatrix& f, double tol = kDefaultClusterTol);

struct GraphPlane {
  CMatrix a;             // plane = {(x, a x)}
  int imSign = 0;        // +1, -1 when Im a is definite, else 0
  double asymmetry = 0;  // ||a - a^T||
};

GraphPlane lagrangian_graph(const CMatrix& basis);

/// q = B(xi - A_- x).(xi - A_+ x)
struct SupersymmetricForm {
  CMatrix aPlus, aMinus, b;
  double residual = 0.0;  // relative residual of the least-squares fit for b

  QuadraticSymbol symbol() const;
};

SupersymmetricForm supersymmetric_decompose(const QuadraticSymbol& q,
                                            double tol = kDefaultClusterTol);
// Validates the definiteness of the planes; fits nothing.
SupersymmetricForm make_supersymmetric(CMatrix aPlus, CMatrix aMinus, CMatrix b);

/// P = Mz.d_z acting on H_Phi, together with the data of the canonical map.
struct NormalForm {
  CMatrix m;
  Weight weight;
  CMatrix gauge;  // L
  CMatrix lambdaPlusBasis, lambdaMinusBasis;  // empty for direct input
  // Real-linear map (x, xi) -> (Re z, Im z); empty for direct input.
  RMatrix pointMap;
  // Complex-linear canonical map (x, xi) -> (z, zeta); empty for direct input.
  CMatrix canonical;

  static NormalForm direct(CMatrix m, Weight w);
  int n() const { return static_cast<int>(m.rows()); }
  bool has_symbol_data() const { return pointMap.size() > 0; }
  // z attached to a real phase-space point
  CVector point(const RVector& xXi) const;
};

NormalForm normal_form(const SupersymmetricForm& s, const CMatrix* gauge = nullptr);
NormalForm normal_form(const QuadraticSymbol& q, const CMatrix* gauge = nullptr,
                       double tol = kDefaultClusterTol);

}  // namespace qf
