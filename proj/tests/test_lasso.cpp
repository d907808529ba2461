#include "oracles.hpp"
#include "rotlasso/designs.hpp"
#include "rotlasso/lasso.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rotlasso;

TEST(SynthResponse, NoiselessIsExact) {
  const DesignMatrix x = gaussian_design(15, 6, SeedSpec{70, 0});
  const SparseVector beta(6, {{1, 2.0}, {4, -0.5}});
  const RegressionInstance inst = synth_response(x, beta, 0.0, SeedSpec{70, 1});
  EXPECT_EQ(inst.y, Vector(x.entries() * beta.to_dense()));
  EXPECT_EQ(inst.sigma, 0.0);
  EXPECT_TRUE(inst.beta_true.has_value());
}

TEST(SynthResponse, PureNoiseHasChiSquareScale) {
  const Index n = 2000;
  const DesignMatrix x = gaussian_design(n, 3, SeedSpec{71, 0});
  const double sigma = 1.5;
  const RegressionInstance inst = synth_response(x, SparseVector::zero(3), sigma, SeedSpec{71, 1});
  const double mean_sq = inst.y.squaredNorm() / static_cast<double>(n);
  EXPECT_NEAR(mean_sq, sigma * sigma, 5.0 * sigma * sigma * std::sqrt(8.0 / static_cast<double>(n)));
  EXPECT_EQ(inst.y, synth_noise(n, sigma, SeedSpec{71, 1}));
}

TEST(SynthResponse, DeterministicAndValidated) {
  const DesignMatrix x = gaussian_design(10, 4, SeedSpec{72, 0});
  const SparseVector beta(4, {{0, 1.0}});
  EXPECT_EQ(synth_response(x, beta, 1.0, SeedSpec{72, 1}).y, synth_response(x, beta, 1.0, SeedSpec{72, 1}).y);
  EXPECT_NE(synth_response(x, beta, 1.0, SeedSpec{72, 1}).y, synth_response(x, beta, 1.0, SeedSpec{72, 2}).y);
  EXPECT_THROW(synth_response(x, beta, -1.0, SeedSpec{}), DomainError);
  EXPECT_THROW(synth_response(x, SparseVector::zero(5), 1.0, SeedSpec{}), SizeError);
}

TEST(ProjectL1, Examples) {
  Vector v(3);
  v << 3.0, -1.0, 0.5;
  EXPECT_EQ(project_l1_ball(v, 10.0), v);
  Vector expect(3);
  expect << 2.0, 0.0, 0.0;
  EXPECT_LE((project_l1_ball(v, 2.0) - expect).norm(), 1e-14);
  expect << 2.5, -0.5, 0.0;
  EXPECT_LE((project_l1_ball(v, 3.0) - expect).norm(), 1e-14);
  EXPECT_EQ(project_l1_ball(v, 0.0), Vector::Zero(3));
  EXPECT_THROW(project_l1_ball(v, -1.0), DomainError);
}

TEST(ProjectL1, MatchesGridOracle) {
  RandomStream r(SeedSpec{73, 0});
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + r.uniform_index(5);
    const Vector v = 2.0 * r.normal_vector(n);
    const double radius = 0.2 + 2.0 * r.uniform();
    const Vector p = project_l1_ball(v, radius);
    const Vector q = oracle::l1_projection_grid(v, radius);
    EXPECT_LE((p - q).lpNorm<Eigen::Infinity>(), 1e-6) << "trial " << trial;
    EXPECT_LE(p.lpNorm<1>(), radius * (1.0 + 1e-12));
  }
}

TEST(Lasso, NoiselessOrthonormalRecoversTruth) {
  const DesignMatrix x = orthonormal_design(20, 8);
  const SparseVector beta(8, {{0, 1.0}, {5, -2.0}});
  const RegressionInstance inst = synth_response(x, beta, 0.0, SeedSpec{74, 0});
  const LassoSolution sol = lasso_constrained(inst, 3.0);
  EXPECT_TRUE(sol.converged);
  EXPECT_LE((sol.beta_hat - beta.to_dense()).norm(), 1e-8);
}

TEST(Lasso, MatchesGridSearchInLowDimension) {
  RandomStream r(SeedSpec{75, 0});
  for (int trial = 0; trial < 12; ++trial) {
    const Index d = 2 + trial % 2;
    const DesignMatrix x = gaussian_design(8, d, SeedSpec{75, static_cast<std::uint64_t>(trial + 1)});
    const Vector y = 2.0 * r.normal_vector(8);
    const double radius = 0.3 + r.uniform();
    RegressionInstance inst{x, y, std::nullopt, 0.0, SeedSpec{}};
    const LassoSolution sol = lasso_constrained(inst, radius);
    const auto f = [&](const Vector& b) { return (y - x.entries() * b).squaredNorm(); };
    const double best = oracle::minimize_on_l1_ball(f, d, radius);
    EXPECT_LE(std::abs(sol.objective - best), 1e-5 * std::max(1.0, best)) << "trial " << trial;
    EXPECT_LE(sol.objective, best + 1e-9 * std::max(1.0, best));
  }
}

TEST(Lasso, FeasibleMonotoneAndStationary) {
  RandomStream r(SeedSpec{76, 0});
  for (int trial = 0; trial < 10; ++trial) {
    const DesignMatrix x = gaussian_design(40, 60, SeedSpec{76, static_cast<std::uint64_t>(trial + 1)});
    const SparseVector beta(60, {{0, 1.0}, {1, -1.0}, {2, 1.0}});
    const RegressionInstance inst = synth_response(x, beta, 0.5, SeedSpec{77, static_cast<std::uint64_t>(trial)});
    LassoOptions opt;
    opt.record_trace = true;
    const LassoSolution sol = lasso_constrained(inst, 3.0, opt);
    EXPECT_TRUE(sol.converged);
    EXPECT_LE(sol.beta_hat.lpNorm<1>(), 3.0 * (1.0 + 1e-12));
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
      EXPECT_LE(sol.objective_trace[i], sol.objective_trace[i - 1] * (1.0 + 1e-12) + 1e-12);
    EXPECT_LE(sol.optimality_residual, 1e-6 * (1.0 + sol.beta_hat.norm()));
    EXPECT_NEAR(sol.optimality_residual, lasso_optimality_residual(x, inst.y, sol.beta_hat, 3.0), 1e-12);
    EXPECT_NEAR(sol.objective, (inst.y - x.entries() * sol.beta_hat).squaredNorm(), 1e-9 * sol.objective);
  }
}

TEST(Lasso, AcceleratedRuleAgrees) {
  const DesignMatrix x = gaussian_design(50, 30, SeedSpec{78, 0});
  const SparseVector beta(30, {{3, 2.0}, {7, -1.0}});
  const RegressionInstance inst = synth_response(x, beta, 1.0, SeedSpec{78, 1});
  const LassoSolution plain = lasso_constrained(inst, 2.5);
  LassoOptions opt;
  opt.step_rule = StepRule::kAcceleratedMonotone;
  opt.record_trace = true;
  const LassoSolution fast = lasso_constrained(inst, 2.5, opt);
  EXPECT_TRUE(fast.converged);
  EXPECT_NEAR(fast.objective, plain.objective, 1e-6 * plain.objective);
  for (std::size_t i = 1; i < fast.objective_trace.size(); ++i)
    EXPECT_LE(fast.objective_trace[i], fast.objective_trace[i - 1] * (1.0 + 1e-12) + 1e-12);
}

TEST(Lasso, TinyRadiusShrinksToZero) {
  const DesignMatrix x = gaussian_design(20, 5, SeedSpec{79, 0});
  const RegressionInstance inst = synth_response(x, SparseVector(5, {{0, 1.0}}), 0.1, SeedSpec{79, 1});
  const LassoSolution sol = lasso_constrained(inst, 1e-9);
  EXPECT_LE(sol.beta_hat.lpNorm<1>(), 1e-9 * (1.0 + 1e-9));
  EXPECT_THROW(lasso_constrained(inst, 0.0), DomainError);
}

TEST(LassoErrors, PredictionAndParameterExamples) {
  const DesignMatrix x = orthonormal_design(4, 3);
  Vector bh(3), b(3);
  bh << 1.0, 2.0, 0.0;
  b << 1.0, 0.0, 1.0;
  EXPECT_NEAR(prediction_error(x, bh, b), 5.0, 1e-12);
  const ParameterErrors pe = parameter_errors(bh, SparseVector(3, {{0, 2.0}, {2, 1.0}}), SupportSet(3, {0, 2}));
  EXPECT_NEAR(pe.l1, 1.0 + 2.0 + 1.0, 1e-12);
  EXPECT_NEAR(pe.l2_restricted, 1.0 + 1.0, 1e-12);
  EXPECT_THROW(prediction_error(x, Vector::Zero(2), b), SizeError);
}
