#pragma once

#include "rotlasso/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rotlasso {

/// y = X beta + w with w ~ N(0, sigma^2 I) drawn from `seed`.
struct RegressionInstance {
  DesignMatrix x;
  Vector y;
  std::optional<SparseVector> beta_true;
  double sigma = 0.0;
  SeedSpec seed{};
};

RegressionInstance synth_response(const DesignMatrix& x, const SparseVector& beta, double sigma,
                                  const SeedSpec& seed);

/// The noise vector synth_response adds for (n, sigma, seed).
Vector synth_noise(Index n, double sigma, const SeedSpec& seed);

/// Euclidean projection onto { w : ||w||_1 <= radius } by sort-and-threshold.
Vector project_l1_ball(const Vector& v, double radius);

enum class StepRule {
  /// Plain projected gradient with step 1/L.
  kConstant,
  /// Monotone accelerated projected gradient (FISTA with a descent safeguard).
  kAcceleratedMonotone,
};

/// Stops once the objective's relative decrease over `window` iterations is at
/// most `tolerance` and the last step is at most 1e-7 (1 + ||b||).
struct LassoOptions {
  StepRule step_rule = StepRule::kConstant;
  double tolerance = 1e-8;
  std::int64_t max_iterations = 200000;
  int window = 50;
  bool record_trace = false;
};

struct LassoSolution {
  Vector beta_hat;
  double radius = 0.0;
  /// ||y - X beta_hat||^2.
  double objective = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  /// ||b - P(b - grad/L)|| at the returned point, with grad of 0.5 ||y - Xb||^2.
  double optimality_residual = 0.0;
  std::vector<double> objective_trace;
};

/// min ||y - X b||^2 subject to ||b||_1 <= radius, started at 0.
LassoSolution lasso_constrained(const RegressionInstance& instance, double radius,
                                const LassoOptions& options = {});

/// Fixed-point residual of projected gradient at b.
double lasso_optimality_residual(const DesignMatrix& x, const Vector& y, const Vector& b,
                                 double radius);

/// (1/n) ||X (beta_hat - beta)||^2.
double prediction_error(const DesignMatrix& x, const Vector& beta_hat, const Vector& beta);

struct ParameterErrors {
  double l1 = 0.0;
  /// ||beta_hat restricted to S minus beta||_2^2.
  double l2_restricted = 0.0;
};

ParameterErrors parameter_errors(const Vector& beta_hat, const SparseVector& beta,
                                 const SupportSet& s);

}  // namespace rotlasso
