#include "rotlasso/certificates.hpp"
#include "rotlasso/designs.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rotlasso;

namespace {

DesignMatrix identical_columns(Index n, Index d, const SeedSpec& seed) {
  RandomStream r(seed);
  Vector v = r.normal_vector(n);
  v *= std::sqrt(static_cast<double>(n)) / v.norm();
  Matrix m(n, d);
  for (Index j = 0; j < d; ++j) m.col(j) = v;
  return DesignMatrix(std::move(m), true);
}

}  // namespace

TEST(Rotation, HaarIsOrthogonal) {
  for (Index n : {1, 3, 17}) {
    const Matrix q = sample_rotation(RotationKind::haar(), n, SeedSpec{3, static_cast<std::uint64_t>(n)});
    EXPECT_LE((q.transpose() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Rotation, HaarFirstColumnIsSignSymmetric) {
  // Without the sign fold the (0,0) entry of Q from Householder QR is biased.
  double sum = 0.0;
  for (std::uint64_t t = 0; t < 2000; ++t)
    sum += sample_rotation(RotationKind::haar(), 4, SeedSpec{5, t})(0, 0);
  EXPECT_NEAR(sum / 2000.0, 0.0, 0.05);
}

TEST(Rotation, EntrywiseKinds) {
  const Matrix r = sample_rotation(RotationKind::rademacher(0.5), 6, SeedSpec{1, 0});
  for (Index i = 0; i < r.size(); ++i) EXPECT_EQ(std::abs(r.data()[i]), 0.5);
  const Matrix g = sample_rotation(RotationKind::gaussian(2.0), 200, SeedSpec{1, 1});
  EXPECT_NEAR(g.squaredNorm() / static_cast<double>(g.size()), 4.0, 0.1);
  EXPECT_THROW(parse_rotation("sideways"), ParseError);
  EXPECT_EQ(parse_rotation("gaussian", 3.0).sigma, 3.0);
  EXPECT_THROW(RotationKind::gaussian(0.0).validate(), DomainError);
  EXPECT_THROW((PartialRotationParams{1.5, 1.0}.validate()), DomainError);
}

TEST(PartiallyRotate, KeepsSupportColumnsBitExact) {
  const DesignMatrix x = gaussian_design(30, 6, SeedSpec{2, 0});
  const SupportSet s(6, {1, 4});
  for (const auto& kind : {RotationKind::haar(), RotationKind::gaussian(), RotationKind::rademacher()}) {
    const DesignMatrix y = partially_rotate(x, s, kind, SeedSpec{2, 1});
    for (Index j : s.indices()) EXPECT_EQ(Vector(y.col(j)), Vector(x.col(j)));
    EXPECT_TRUE(columns_have_norm_sqrt_n(y.entries()));
    const SupportSet comp = s.complement();
    for (Index j : comp.indices()) EXPECT_NE(Vector(y.col(j)), Vector(x.col(j)));
  }
}

TEST(PartiallyRotate, DeterministicAndSeedSensitive) {
  const DesignMatrix x = gaussian_design(20, 5, SeedSpec{4, 0});
  const SupportSet s(5, {0});
  const auto a = partially_rotate(x, s, RotationKind::haar(), SeedSpec{4, 1});
  const auto b = partially_rotate(x, s, RotationKind::haar(), SeedSpec{4, 1});
  const auto c = partially_rotate(x, s, RotationKind::haar(), SeedSpec{4, 2});
  EXPECT_EQ(a.entries(), b.entries());
  EXPECT_NE(a.entries(), c.entries());
}

TEST(PartiallyRotate, RequiresNormalizedInput) {
  const DesignMatrix raw(Matrix::Ones(4, 3));
  EXPECT_THROW(partially_rotate(raw, SupportSet(3, {0}), RotationKind::haar(), SeedSpec{}), DomainError);
}

TEST(PartiallyRotate, DecorrelatesDuplicatedBoundary) {
  const DesignMatrix x = identical_columns(200, 4, SeedSpec{6, 0});
  const SupportSet s(4, {0, 1});
  EXPECT_NEAR(rno_fixed_supports(x, s, SupportSet(4, {0}), SupportSet(4, {2})), 1.0, 1e-12);
  const DesignMatrix y = partially_rotate(x, s, RotationKind::haar(), SeedSpec{6, 1});
  EXPECT_LT(rno_fixed_supports(y, s, SupportSet(4, {0}), SupportSet(4, {2})), 0.4);
}

TEST(Semirandom, EmptySupportCopiesDesign) {
  const DesignMatrix x = gaussian_design(10, 4, SeedSpec{7, 0});
  const auto y = semirandom_gaussian_design(x, SupportSet::empty_of(4), SeedSpec{7, 1});
  EXPECT_EQ(y.entries(), x.entries());
}

TEST(Semirandom, FullSupportReplacesEveryColumn) {
  const DesignMatrix x = identical_columns(16, 3, SeedSpec{8, 0});
  const auto y = semirandom_gaussian_design(x, SupportSet::all(3), SeedSpec{8, 1});
  EXPECT_TRUE(columns_have_norm_sqrt_n(y.entries()));
  for (Index j = 0; j < 3; ++j) EXPECT_NE(Vector(y.col(j)), Vector(x.col(j)));
}

TEST(Semirandom, FreshColumnsNearlyOrthogonal) {
  const Index n = 400;
  const DesignMatrix x = identical_columns(n, 3, SeedSpec{9, 0});
  const double limit = 5.0 / std::sqrt(static_cast<double>(n));
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto y = semirandom_gaussian_design(x, SupportSet(3, {0, 1}), SeedSpec{9, t + 1});
    EXPECT_LE(std::abs(y.col(0).dot(y.col(1))) / static_cast<double>(n), limit);
    EXPECT_EQ(Vector(y.col(2)), Vector(x.col(2)));
  }
}

TEST(RotatedAdversary, AppendsRotatedColumns) {
  const DesignMatrix x = gaussian_design(25, 3, SeedSpec{10, 0});
  RandomStream r(SeedSpec{10, 1});
  const Matrix adv = r.normal_matrix(25, 2) * 3.0;
  const auto y = rotated_adversary_design(x, adv, RotationKind::haar(), SeedSpec{10, 2});
  EXPECT_EQ(y.cols(), 5);
  EXPECT_EQ(y.entries().leftCols(3), x.entries());
  EXPECT_TRUE(columns_have_norm_sqrt_n(y.entries()));
  // Haar rotation preserves the angle between the adversary columns.
  const double before = adv.col(0).dot(adv.col(1)) / (adv.col(0).norm() * adv.col(1).norm());
  const double after = y.col(3).dot(y.col(4)) / (y.col(3).norm() * y.col(4).norm());
  EXPECT_NEAR(before, after, 1e-12);
  EXPECT_EQ(rotated_adversary_design(x, Matrix(25, 0), RotationKind::haar(), SeedSpec{}).entries(),
            x.entries());
  EXPECT_THROW(rotated_adversary_design(x, Matrix::Ones(24, 1), RotationKind::haar(), SeedSpec{}),
               SizeError);
}

TEST(Counterexample, StructureAndWitness) {
  for (Index k : {4, 10}) {
    const auto ce = counterexample_design(40, k + 5, k, SeedSpec{11, static_cast<std::uint64_t>(k)});
    EXPECT_TRUE(ce.x.normalized());
    EXPECT_EQ(ce.support, SupportSet::range(k + 5, 0, k));
    const Matrix g = restrict_columns(ce.x, ce.support).scaled_gram();
    EXPECT_LE((g - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(Vector(ce.x.col(k)), Vector(ce.x.col(k + 1)));
    const SparseVector w = counterexample_witness(k + 5, k);
    EXPECT_TRUE(cone_membership(w, ConeSpec{ce.support, 1.0}));
    const double kd = static_cast<double>(k);
    EXPECT_NEAR(re_objective(ce.x, w, ce.support, ReMode::kGammaPrime), kd / (kd + kd * kd / 2.0), 1e-12);
  }
  EXPECT_THROW(counterexample_design(5, 10, 4, SeedSpec{}), SizeError);
}

TEST(CorrelatedBlocks, ExactCopiesAndPerturbations) {
  const SupportSet s = SupportSet::range(10, 0, 2);
  const auto exact = correlated_block_design(30, 10, s, BlockSpec::contiguous(s, 4), SeedSpec{12, 0});
  EXPECT_TRUE(exact.normalized());
  EXPECT_EQ(Vector(exact.col(2)), Vector(exact.col(5)));
  EXPECT_EQ(Vector(exact.col(6)), Vector(exact.col(9)));
  EXPECT_NE(Vector(exact.col(2)), Vector(exact.col(6)));

  const auto fuzzy = correlated_block_design(30, 10, s, BlockSpec::contiguous(s, 4, 0.1), SeedSpec{12, 0});
  const double cosine = fuzzy.col(2).dot(fuzzy.col(3)) / 30.0;
  EXPECT_GT(cosine, 0.9);
  EXPECT_LT(cosine, 1.0);
}

TEST(CorrelatedBlocks, RejectsMalformedSpecs) {
  const SupportSet s = SupportSet::range(6, 0, 2);
  BlockSpec bad;
  bad.groups.push_back(ColumnGroup{{}, 0.0});
  EXPECT_THROW(correlated_block_design(10, 6, s, bad, SeedSpec{}), SpecError);
  BlockSpec overlap;
  overlap.groups.push_back(ColumnGroup{{0, 2}, 0.0});
  EXPECT_THROW(correlated_block_design(10, 6, s, overlap, SeedSpec{}), SpecError);
  BlockSpec partial;
  partial.groups.push_back(ColumnGroup{{2, 3}, 0.0});
  EXPECT_THROW(correlated_block_design(10, 6, s, partial, SeedSpec{}), SpecError);
  EXPECT_EQ(BlockSpec::with_groups(s, 3).groups.size(), 3u);
  EXPECT_EQ(BlockSpec::with_groups(s, 1).groups.front().columns.size(), 4u);
}

TEST(SimpleDesigns, GaussianAndOrthonormal) {
  const auto g = gaussian_design(12, 5, SeedSpec{13, 0});
  EXPECT_TRUE(columns_have_norm_sqrt_n(g.entries()));
  const auto o = orthonormal_design(6, 4);
  EXPECT_LE((o.scaled_gram() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(orthonormal_design(3, 4), SizeError);
}
