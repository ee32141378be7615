#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "quadfock/polyoracle.hpp"

using namespace qf;

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

TEST(Monomials, CountAndOrder) {
  const auto b = monomials(2, 3);
  ASSERT_EQ(b.size(), 10u);
  EXPECT_EQ(b[0], (MultiIndex{0, 0}));
  EXPECT_EQ(b[1], (MultiIndex{1, 0}));
  EXPECT_EQ(b[2], (MultiIndex{0, 1}));
  EXPECT_EQ(b[3], (MultiIndex{2, 0}));
  for (size_t k = 1; k < b.size(); ++k) EXPECT_LE(degree(b[k - 1]), degree(b[k]));
  EXPECT_EQ(monomials(3, 4).size(), 35u);
  EXPECT_THROW(gram(Weight::standard(1), kMaxOracleDegree + 1), InputError);
}

TEST(Gram, StandardWeightIsDiagonalFactorials) {
  const GramTable g = gram(Weight::standard(1), 8);
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j) {
      const double expect = i == j ? std::numbers::pi * factorial(g.basis[i][0]) : 0.0;
      EXPECT_NEAR(std::abs(g.entries(i, j) - expect), 0, 1e-10 * std::max(1.0, expect)) << i << "," << j;
    }
  const GramTable g2 = gram(Weight::standard(2), 4);
  for (int i = 0; i < g2.size(); ++i) {
    const double expect =
        std::numbers::pi * std::numbers::pi * factorial(g2.basis[i][0]) * factorial(g2.basis[i][1]);
    EXPECT_NEAR(g2.entries(i, i).real(), expect, 1e-10 * expect);
  }
  EXPECT_FALSE(g.normalization.empty());
}

TEST(Gram, IsHermitianPositive) {
  std::mt19937_64 rng(31);
  const GramTable g = gram(fx::random_weight(2, rng, 0.6), 5);
  EXPECT_LE((g.entries - g.entries.adjoint()).norm(), 1e-10 * g.entries.norm());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g.entries);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0);
}

TEST(Gram, RotatedWeightMatchesMonteCarlo) {
  const NormalForm nf = fx::rho_normal_form(5 * std::numbers::pi / 12);
  const GramTable g = gram(nf.weight, 4);
  const MonteCarloGram mc = gram_monte_carlo(nf.weight, 4, 1000000, 77);
  // degree j and j+2 couple through the pluriharmonic part
  EXPECT_GT(std::abs(g.entries(0, 2)), 0.1);
  EXPECT_NEAR(std::abs(g.entries(0, 1)), 0, 1e-12);
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      EXPECT_LE(std::abs(g.entries(i, j) - mc.mean(i, j)), 4 * std::sqrt(2.0) * mc.stdError(i, j) + 1e-12)
          << i << "," << j;
}

TEST(Kernel, StandardPartialSumsAreTaylorSums) {
  CVector w(1);
  w << cplx(0.6, -0.8);
  const KernelCheck k = reproducing_kernel_check(Weight::standard(1), w, 6);
  double taylor = 0;
  for (int j = 0; j <= 6; ++j) taylor += std::pow(1.0, j) / factorial(j);
  EXPECT_NEAR(k.partialSum, taylor / std::numbers::pi, 1e-12);
  EXPECT_NEAR(k.target, std::exp(1.0) / std::numbers::pi, 1e-13);
  CVector zero = CVector::Zero(1);
  const KernelCheck k0 = reproducing_kernel_check(Weight::standard(1), zero, 3);
  EXPECT_NEAR(k0.partialSum, 1 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(k0.target, 1 / std::numbers::pi, 1e-14);
}

TEST(Kernel, RotatedWeightConvergesAtRateSinSquared) {
  // the deficit shrinks by ||bigH||^2 = sin^2 theta per two degrees
  for (double th : {0.3, 0.8}) {
    const NormalForm nf = fx::rho_normal_form(th);
    CVector w(1);
    w << cplx(0.3, 0.2);
    std::vector<double> deficit;
    for (int d = 6; d <= 12; d += 2) {
      const KernelCheck k = reproducing_kernel_check(nf.weight, w, d);
      deficit.push_back(1 - k.partialSum / k.target);
      EXPECT_GT(deficit.back(), 0);
    }
    for (size_t k = 1; k < deficit.size(); ++k)
      EXPECT_NEAR(deficit[k] / deficit[k - 1], std::pow(std::sin(th), 2), 0.1 * std::pow(std::sin(th), 2)) << th;
  }
}

TEST(TruncatedOperator, DiagonalAndMonomialImage) {
  CMatrix a(2, 2);
  a << 1, 2, 0, 3;
  const TruncatedOperator t = truncated_operator(a, 2);
  ASSERT_EQ(t.basis.size(), 6u);
  // z1 -> z1 + 2 z2, z2 -> 3 z2; so z1 z2 -> 3 z1 z2 + 6 z2^2
  int iz1z2 = -1, iz2sq = -1;
  for (int i = 0; i < 6; ++i) {
    if (t.basis[i] == MultiIndex{1, 1}) iz1z2 = i;
    if (t.basis[i] == MultiIndex{0, 2}) iz2sq = i;
  }
  EXPECT_NEAR(std::abs(t.matrix(iz1z2, iz1z2) - 3.0), 0, 1e-14);
  EXPECT_NEAR(std::abs(t.matrix(iz2sq, iz1z2) - 6.0), 0, 1e-14);
  EXPECT_NEAR(std::abs(t.matrix(iz2sq, iz2sq) - 9.0), 0, 1e-14);
}

TEST(TruncatedNorm, HarmonicOscillator) {
  const NormalForm ho = fx::standard_normal_form(CMatrix::Identity(1, 1));
  for (double t : {0.5, 2.0}) {
    EXPECT_NEAR(truncated_norm(ho, cplx(-t, 0), 8), 1.0, 1e-12);
    for (int N : {0, 3, 7}) EXPECT_NEAR(truncated_tail_norm(ho, cplx(-t, 0), N, 8), std::exp(-t * (N + 1)), 1e-12);
  }
  EXPECT_THROW(truncated_tail_norm(ho, cplx(-1, 0), 8, 8), InputError);
}

TEST(TruncatedNorm, MonotoneInDegree) {
  const NormalForm nf = fx::rho_normal_form(5 * std::numbers::pi / 12);
  const cplx tau(-7, 0);
  double prev = 0;
  for (int d = 2; d <= 10; d += 2) {
    const double v = truncated_norm(nf, tau, d);
    EXPECT_GE(v, prev - 1e-9);
    prev = v;
  }
}

TEST(PiNorm, StandardIsOneRotatedExceedsOne) {
  EXPECT_NEAR(pi_norm(Weight::standard(2), 2, 5), 1.0, 1e-12);
  const NormalForm nf = fx::rho_normal_form(5 * std::numbers::pi / 12);
  const double p0 = pi_norm(nf.weight, 0, 8);
  EXPECT_GT(p0, 1.0 + 1e-3);
  EXPECT_THROW(pi_norm(nf.weight, 9, 8), InputError);
}

TEST(ChangeOfVars, Identity) {
  const NormalForm nf = fx::rho_normal_form(0.7);
  EXPECT_LE(change_of_vars_identity_check(nf, cplx(0, 0), 6), 1e-10);
  EXPECT_LE(change_of_vars_identity_check(nf, cplx(-0.7, 0.4), 6), 1e-8);
  std::mt19937_64 rng(41);
  const NormalForm r = NormalForm::direct(fx::random_complex(2, 2, rng, 0.4), fx::random_weight(2, rng, 0.5));
  EXPECT_LE(change_of_vars_identity_check(r, cplx(-0.5, 0.2), 5), 1e-8);
}

TEST(SingularValues, DescendingAndBoundedByNorm) {
  const NormalForm nf = fx::standard_normal_form(fx::fp_matrix(0.5, 0.3));
  const RVector s = truncated_singular_values(nf, cplx(-2, 0), 6);
  for (int k = 1; k < s.size(); ++k) EXPECT_LE(s(k), s(k - 1) + 1e-14);
  EXPECT_NEAR(s(0), truncated_norm(nf, cplx(-2, 0), 6), 1e-12);
}
