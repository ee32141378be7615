#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quadfock/numkit.hpp"
#include "quadfock/reduction.hpp"
#include "quadfock/weight.hpp"

namespace qf {

inline constexpr int kMaxOracleDegree = 12;

using MultiIndex = std::vector<int>;

// All alpha in N^n with |alpha| <= maxDegree, ordered by degree, then
// lexicographically descending.
std::vector<MultiIndex> monomials(int n, int maxDegree);
int degree(const MultiIndex& a);

/// entries(i, j) = <z^alpha_j, z^alpha_i>_Phi = int z^alpha_j conj(z^alpha_i) e^{-2 Phi} dL
/// with dL the Lebesgue measure of R^{2n}.
struct GramTable {
  Weight weight;
  int maxDegree = 0;
  std::vector<MultiIndex> basis;
  CMatrix entries;
  std::string normalization;

  int size() const { return static_cast<int>(basis.size()); }
  // indices of basis elements with lo <= |alpha| <= hi
  std::vector<int> degree_range(int lo, int hi) const;
};

GramTable gram(const Weight& w, int maxDegree);

struct MonteCarloGram {
  CMatrix mean;
  RMatrix stdError;  // of |entry|, componentwise max of re/im standard errors
};

// Seeded cross-check, never used as the primary value.
MonteCarloGram gram_monte_carlo(const Weight& w, int maxDegree, long samples,
                                std::uint64_t seed);

struct KernelCheck {
  double partialSum = 0.0;
  double target = 0.0;
};

// Partial sums converge quickly once |G w|^2 is well below maxDegree / e.
KernelCheck reproducing_kernel_check(const Weight& w, const CVector& z, int maxDegree);

/// u(z) -> u(e^{tau M} z) on polynomials of degree <= maxDegree, in the
/// monomial basis of gram(); block diagonal by degree.
struct TruncatedOperator {
  std::vector<MultiIndex> basis;
  CMatrix matrix;
};

TruncatedOperator truncated_operator(const CMatrix& a, int maxDegree);

double truncated_norm(const NormalForm& nf, cplx tau, int maxDegree);
double truncated_tail_norm(const NormalForm& nf, cplx tau, int N, int maxDegree);
double pi_norm(const Weight& w, int N, int maxDegree);
double change_of_vars_identity_check(const NormalForm& nf, cplx tau, int maxDegree,
                                     std::uint64_t seed = 2024);

// Operator norm of `op` restricted to the coefficient indices `idx`, measured
// in the Gram inner product. The index set must be invariant under op.
double gram_operator_norm(const CMatrix& gramEntries, const CMatrix& op,
                          const std::vector<int>& idx);

// Singular values of the truncation, Gram-normalized, descending.
RVector truncated_singular_values(const NormalForm& nf, cplx tau, int maxDegree);

}  // namespace qf
