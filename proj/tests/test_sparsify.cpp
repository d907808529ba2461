#include "rotlasso/designs.hpp"
#include "rotlasso/sparsify.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace rotlasso;

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double one_attempt_error(const DesignMatrix& x, const Vector& beta, Index s, const SeedSpec& seed) {
  try {
    return maurey_sparsify(x, beta, s, seed, 1).error;
  } catch (const SparsifyFailure& f) {
    return f.best().error;
  }
}

}  // namespace

TEST(Sparsify, AlreadySparseIsReturnedUnchanged) {
  const DesignMatrix x = gaussian_design(10, 8, SeedSpec{50, 0});
  const SparseVector beta(8, {{1, 2.0}, {6, -1.0}});
  const SparsifyResult r = maurey_sparsify(x, beta, 3, SeedSpec{50, 1});
  EXPECT_EQ(r.beta_prime, beta);
  EXPECT_EQ(r.attempts, 0);
  EXPECT_EQ(r.error, 0.0);
}

TEST(Sparsify, BoundUsesLargestColumnNorm) {
  const Index n = 30;
  const DesignMatrix x = gaussian_design(n, 50, SeedSpec{51, 0});
  RandomStream r(SeedSpec{51, 1});
  const Vector beta = r.normal_vector(50);
  const SparsifyResult res = maurey_sparsify(x, beta, 25, SeedSpec{51, 2});
  const double expect = 2.0 * std::sqrt(static_cast<double>(n)) * beta.lpNorm<1>() / 5.0;
  EXPECT_NEAR(res.bound, expect, 1e-9 * expect);
  EXPECT_LE(res.error, res.bound);
  EXPECT_LE(res.beta_prime.nnz(), 25);
  const Vector direct = x.entries() * (beta - res.beta_prime.to_dense());
  EXPECT_NEAR(res.error, direct.norm(), 1e-10 * std::max(1.0, direct.norm()));
}

TEST(Sparsify, ErrorExamples) {
  const DesignMatrix x = orthonormal_design(4, 3);
  const SparseVector beta(3, {{0, 1.0}, {1, 1.0}});
  EXPECT_NEAR(sparsification_error(x, beta, SparseVector(3, {{0, 1.0}})), 2.0, 1e-12);
  EXPECT_NEAR(sparsification_error(x, beta, SparseVector(3, {{0, 2.0}})), std::sqrt(8.0), 1e-12);
  Vector b(3), bp(3);
  b << 1.0, 0.0, 0.0;
  bp << 0.0, 0.0, 0.0;
  EXPECT_NEAR(sparsification_error(x, b, bp), 2.0, 1e-12);
  EXPECT_THROW(sparsification_error(x, Vector::Zero(2), bp), SizeError);
}

TEST(Sparsify, RandomTriplesStayWithinBound) {
  RandomStream r(SeedSpec{52, 0});
  std::vector<double> attempts;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const Index n = 5 + r.uniform_index(30);
    const Index d = 2 + r.uniform_index(40);
    const Index s = 1 + r.uniform_index(d);
    const DesignMatrix x = gaussian_design(n, d, SeedSpec{53, t});
    const Vector beta = r.normal_vector(d);
    const SparsifyResult res = maurey_sparsify(x, beta, s, SeedSpec{54, t});
    ASSERT_LE(res.error, res.bound) << "trial " << t;
    ASSERT_LE(res.beta_prime.nnz(), s);
    ASSERT_LE(res.beta_prime.l1_norm(), beta.lpNorm<1>() * (1.0 + 1e-12));
    attempts.push_back(res.attempts);
  }
  EXPECT_LE(median_of(attempts), 2.0);
}

TEST(Sparsify, ErrorScalesLikeInverseRootS) {
  const DesignMatrix x = gaussian_design(40, 400, SeedSpec{55, 0});
  RandomStream r(SeedSpec{55, 1});
  const Vector beta = r.normal_vector(400);
  std::vector<double> ratios;
  for (std::uint64_t t = 0; t < 60; ++t) {
    ratios.push_back(one_attempt_error(x, beta, 10, SeedSpec{56, t}) /
                     one_attempt_error(x, beta, 20, SeedSpec{57, t}));
  }
  const double m = median_of(ratios);
  EXPECT_GE(m, 1.2);
  EXPECT_LE(m, 1.7);
}

TEST(Sparsify, DeterministicInSeed) {
  const DesignMatrix x = gaussian_design(20, 30, SeedSpec{58, 0});
  RandomStream r(SeedSpec{58, 1});
  const Vector beta = r.normal_vector(30);
  const auto a = maurey_sparsify(x, beta, 5, SeedSpec{58, 2});
  const auto b = maurey_sparsify(x, beta, 5, SeedSpec{58, 2});
  EXPECT_EQ(a.beta_prime, b.beta_prime);
  EXPECT_EQ(a.error, b.error);
}

TEST(Sparsify, FailureCarriesBestAttempt) {
  const DesignMatrix x = gaussian_design(20, 30, SeedSpec{59, 0});
  RandomStream r(SeedSpec{59, 1});
  const Vector beta = r.normal_vector(30);
  EXPECT_THROW(maurey_sparsify(x, beta, 5, SeedSpec{}, 0), DomainError);
  for (std::uint64_t t = 0; t < 200; ++t) {
    try {
      const auto res = maurey_sparsify(x, beta, 5, SeedSpec{60, t}, 1);
      EXPECT_LE(res.error, res.bound);
    } catch (const SparsifyFailure& f) {
      EXPECT_GT(f.best().error, f.best().bound);
      EXPECT_EQ(f.best().attempts, 1);
    }
  }
}
