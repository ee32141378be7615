#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "quadfock/numkit.hpp"

namespace qf {

// Index value where std::nullopt stands for "infinite".
using Index = std::optional<int>;

std::string index_string(const Index& i);

/// q(x, xi) = x.qxx.x + 2 x.qxxi.xi + xi.qxixi.xi on R^{2n}, complex valued.
struct QuadraticSymbol {
  int n = 0;
  CMatrix qxx, qxxi, qxixi;

  // Validates shapes and exact symmetry of qxx, qxixi.
  static QuadraticSymbol make(CMatrix qxx, CMatrix qxxi, CMatrix qxixi);
  // From the 2n x 2n symmetric matrix Q with q(v) = v^T Q v.
  static QuadraticSymbol from_matrix(const CMatrix& Q);

  CMatrix matrix() const;  // Q
  cplx operator()(const CVector& v) const;  // v = (x, xi), possibly complex
  cplx operator()(const RVector& v) const;
  QuadraticSymbol real_part() const;
  QuadraticSymbol imag_part() const;
  QuadraticSymbol compose(const RMatrix& K) const;  // q o K for real K
};

struct FundamentalMatrix {
  CMatrix f;
};

// J = [[0, I], [-I, 0]]
RMatrix symplectic_j(int n);

FundamentalMatrix fundamental_matrix(const QuadraticSymbol& q);
QuadraticSymbol symbol_of(const FundamentalMatrix& F);

// sigma((x, xi), (y, eta)) = xi.y - eta.x, bilinear.
cplx symplectic(const CVector& v, const CVector& w);

QuadraticSymbol poisson_bracket(const QuadraticSymbol& q1, const QuadraticSymbol& q2);

struct SpectrumFlag {
  bool raised = false;
  RVector witness;           // point on the unit sphere when raised
  double symbolValue = 0.0;  // |q(witness)|
  double bracketValue = 0.0; // {Im q, Re q}(witness)
  int restarts = 0;
  std::string note;
};

inline constexpr int kDefaultRestarts = 64;

// Multi-start search for a real zero of q with a nonvanishing bracket.
// A negative result is not a proof.
SpectrumFlag spectrum_is_C_flag(const QuadraticSymbol& q, int restarts = kDefaultRestarts,
                                std::uint64_t seed = 12345);

// min{k : Re F (Im F)^k v != 0}; throws HypothesisError when Re q is not PSD.
Index index_J(const QuadraticSymbol& q, const RVector& v);

}  // namespace qf
