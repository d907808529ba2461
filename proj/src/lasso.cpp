#include "rotlasso/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rotlasso {

namespace {

double squared_residual(const DesignMatrix& x, const Vector& y, const Vector& b) {
  return (y - x.entries() * b).squaredNorm();
}

double lipschitz_constant(const DesignMatrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x.entries());
  const double smax = svd.singularValues()(0);
  return smax * smax;
}

/// Step length as a fraction of (1 + ||b||) below which the iterate counts as stationary.
constexpr double kStationaryTol = 1e-7;

}  // namespace

Vector synth_noise(Index n, double sigma, const SeedSpec& seed) {
  if (!(sigma >= 0.0)) throw DomainError("noise level sigma must be non-negative");
  RandomStream rng(seed);
  return sigma * rng.normal_vector(n);
}

RegressionInstance synth_response(const DesignMatrix& x, const SparseVector& beta, double sigma,
                                  const SeedSpec& seed) {
  if (beta.dim() != x.cols()) throw SizeError("beta dimension does not match the design");
  Vector y = Vector::Zero(x.rows());
  for (const auto& [j, v] : beta.terms()) y += v * x.col(j);
  if (sigma > 0.0) y += synth_noise(x.rows(), sigma, seed);
  else if (!(sigma >= 0.0)) throw DomainError("noise level sigma must be non-negative");
  return RegressionInstance{x, std::move(y), beta, sigma, seed};
}

Vector project_l1_ball(const Vector& v, double radius) {
  if (!(radius >= 0.0)) throw DomainError("l1 radius must be non-negative");
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double m = std::abs(v(order[j]));
    cumulative += m;
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    const double next = j + 1 < order.size() ? std::abs(v(order[j + 1])) : 0.0;
    if (candidate >= next) {
      theta = candidate;
      break;
    }
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = v(i) < 0.0 ? -mag : mag;
  }
  return out;
}

double lasso_optimality_residual(const DesignMatrix& x, const Vector& y, const Vector& b,
                                 double radius) {
  const double lip = lipschitz_constant(x);
  if (lip == 0.0) return 0.0;
  const Vector grad = -(x.entries().transpose() * (y - x.entries() * b));
  return (b - project_l1_ball(b - grad / lip, radius)).norm();
}

LassoSolution lasso_constrained(const RegressionInstance& instance, double radius,
                                const LassoOptions& options) {
  const DesignMatrix& x = instance.x;
  const Vector& y = instance.y;
  if (y.size() != x.rows()) throw SizeError("response length does not match the design");
  if (!(radius > 0.0)) throw DomainError("Lasso radius must be positive");
  if (options.window < 1) throw DomainError("stopping window must be at least 1");

  const Matrix& a = x.entries();
  const Index d = x.cols();
  const double lip = lipschitz_constant(x);

  LassoSolution sol;
  sol.radius = radius;
  Vector b = Vector::Zero(d);
  double f = y.squaredNorm();
  std::vector<double> history{f};
  if (options.record_trace) sol.objective_trace.push_back(f);
  if (lip == 0.0) {
    sol.beta_hat = b;
    sol.objective = f;
    sol.converged = true;
    return sol;
  }

  const double floor = 1e-12 * std::max(y.squaredNorm(), 1e-300);
  const auto window = static_cast<std::size_t>(options.window);
  Vector v = b;
  double t = 1.0;
  double step_norm = 0.0;

  for (std::int64_t it = 1; it <= options.max_iterations; ++it) {
    if (options.step_rule == StepRule::kConstant) {
      const Vector grad = -(a.transpose() * (y - a * b));
      const Vector next = project_l1_ball(b - grad / lip, radius);
      step_norm = (next - b).norm();
      b = next;
      f = squared_residual(x, y, b);
    } else {
      const Vector grad_v = -(a.transpose() * (y - a * v));
      const Vector z = project_l1_ball(v - grad_v / lip, radius);
      const double fz = squared_residual(x, y, z);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const Vector prev = b;
      if (fz <= f) {
        b = z;
        f = fz;
      }
      v = b + (t / t_next) * (z - b) + ((t - 1.0) / t_next) * (b - prev);
      t = t_next;
      const Vector grad_b = -(a.transpose() * (y - a * b));
      step_norm = (b - project_l1_ball(b - grad_b / lip, radius)).norm();
    }
    history.push_back(f);
    if (options.record_trace) sol.objective_trace.push_back(f);
    sol.iterations = it;
    if (history.size() > window) {
      const double old = history[history.size() - 1 - window];
      const double decrease = old - f;
      const bool flat = decrease <= options.tolerance * std::max(old, floor);
      const bool stationary = step_norm <= kStationaryTol * (1.0 + b.norm());
      if (flat && stationary) {
        sol.converged = true;
        break;
      }
    }
  }
  sol.beta_hat = b;
  sol.objective = squared_residual(x, y, b);
  sol.optimality_residual = lasso_optimality_residual(x, y, b, radius);
  return sol;
}

double prediction_error(const DesignMatrix& x, const Vector& beta_hat, const Vector& beta) {
  if (beta_hat.size() != x.cols() || beta.size() != x.cols())
    throw SizeError("coefficient dimension does not match the design");
  return (x.entries() * (beta_hat - beta)).squaredNorm() / static_cast<double>(x.rows());
}

ParameterErrors parameter_errors(const Vector& beta_hat, const SparseVector& beta,
                                 const SupportSet& s) {
  if (beta_hat.size() != beta.dim() || s.dim() != beta.dim())
    throw SizeError("dimensions of beta_hat, beta and S must agree");
  const Vector dense = beta.to_dense();
  ParameterErrors out;
  out.l1 = (beta_hat - dense).lpNorm<1>();
  Vector restricted = Vector::Zero(beta_hat.size());
  for (Index j : s.indices()) restricted(j) = beta_hat(j);
  out.l2_restricted = (restricted - dense).squaredNorm();
  return out;
}

}  // namespace rotlasso
