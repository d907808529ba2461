#pragma once

// Reference computations used only by tests. They avoid the library code paths
// they are compared against (no SVD-based bases, no sort-and-threshold).

#include "rotlasso/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using rotlasso::Index;
using rotlasso::Matrix;
using rotlasso::Vector;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Singular values of m (descending) from the Jacobi eigenvalues of m'm.
inline std::vector<double> singular_values(const Matrix& m) {
  auto ev = jacobi_eigenvalues(m.transpose() * m);
  std::vector<double> sv;
  for (auto it = ev.rbegin(); it != ev.rend(); ++it) sv.push_back(std::sqrt(std::max(*it, 0.0)));
  return sv;
}

/// Projection of y onto col(a) through the normal equations (pivoted QR solve).
inline Vector project_onto_span(const Matrix& a, const Vector& y) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const Vector coef = qr.solve(y);
  return a * coef;
}

/// Maximum over the ball ||w||_1 <= r of -||w - v||^2, brute-force on a grid
/// followed by local pattern search; returns the minimizer.
inline Vector l1_projection_grid(const Vector& v, double radius) {
  const Index n = v.size();
  auto cost = [&](const Vector& w) { return (w - v).squaredNorm(); };
  auto clip = [&](Vector w) {
    const double l1 = w.lpNorm<1>();
    if (l1 > radius && l1 > 0) w *= radius / l1;
    return w;
  };
  // Coarse grid over the box [-r, r]^n restricted to the ball.
  const int steps = n <= 2 ? 200 : (n == 3 ? 40 : (n == 4 ? 16 : 10));
  Vector best = Vector::Zero(n);
  double best_cost = cost(best);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vector w(n);
    for (Index i = 0; i < n; ++i)
      w(i) = -radius + 2.0 * radius * idx[static_cast<std::size_t>(i)] / steps;
    if (w.lpNorm<1>() <= radius + 1e-15) {
      const double c = cost(w);
      if (c < best_cost) {
        best_cost = c;
        best = w;
      }
    }
    Index i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] > steps) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  // Pattern search along coordinate and pairwise mass-transfer directions.
  double h = 2.0 * radius / steps;
  while (h > 1e-10) {
    bool improved = false;
    for (Index i = 0; i < n; ++i) {
      for (Index j = -1; j < n; ++j) {
        for (double sgn : {-1.0, 1.0}) {
          for (double sgn2 : {-1.0, 1.0}) {
            Vector w = best;
            w(i) += sgn * h;
            if (j >= 0 && j != i) w(j) += sgn2 * h;
            else if (j >= 0) continue;
            w = clip(w);
            const double c = cost(w);
            if (c < best_cost - 1e-18) {
              best_cost = c;
              best = w;
              improved = true;
            }
          }
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return best;
}

/// Minimum of f over the l1 ball in R^2 or R^3 by grid search plus pattern refinement.
inline double minimize_on_l1_ball(const std::function<double(const Vector&)>& f, Index n,
                                  double radius) {
  const int steps = n == 1 ? 4000 : (n == 2 ? 400 : 60);
  Vector best = Vector::Zero(n);
  double best_val = f(best);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vector w(n);
    for (Index i = 0; i < n; ++i)
      w(i) = -radius + 2.0 * radius * idx[static_cast<std::size_t>(i)] / steps;
    if (w.lpNorm<1>() <= radius + 1e-15) {
      const double c = f(w);
      if (c < best_val) {
        best_val = c;
        best = w;
      }
    }
    Index i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] > steps) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  double h = 2.0 * radius / steps;
  while (h > 1e-11) {
    bool improved = false;
    for (Index i = 0; i < n; ++i) {
      for (Index j = -1; j < n; ++j) {
        if (j == i) continue;
        for (double a : {-1.0, 1.0}) {
          for (double b : {-1.0, 1.0}) {
            Vector w = best;
            w(i) += a * h;
            if (j >= 0) w(j) += b * h;
            const double l1 = w.lpNorm<1>();
            if (l1 > radius) w *= radius / l1;
            const double c = f(w);
            if (c < best_val - 1e-16) {
              best_val = c;
              best = w;
              improved = true;
            }
          }
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return best_val;
}

}  // namespace oracle
