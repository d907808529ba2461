#include "rotlasso/certificates.hpp"
#include "rotlasso/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rotlasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxOuterIterations = 5000;
constexpr int kRefineCandidates = 8;

double largest_eigenvalue(const Matrix& sym) {
  if (sym.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues()(sym.rows() - 1), 0.0);
}

// Gram matrix partitioned into the cone support P and its complement Q.
struct ConeSplit {
  std::vector<Index> p;
  std::vector<Index> q;
  Matrix gpp;
  Matrix gpq;
  Matrix gqq;
  double lip_q = 0.0;
};

ConeSplit split_gram(const Matrix& gram, const SupportSet& s) {
  ConeSplit cs;
  cs.p = s.indices();
  cs.q = s.complement().indices();
  const auto np = static_cast<Index>(cs.p.size());
  const auto nq = static_cast<Index>(cs.q.size());
  cs.gpp.resize(np, np);
  cs.gpq.resize(np, nq);
  cs.gqq.resize(nq, nq);
  for (Index i = 0; i < np; ++i) {
    for (Index j = 0; j < np; ++j) cs.gpp(i, j) = gram(cs.p[i], cs.p[j]);
    for (Index j = 0; j < nq; ++j) cs.gpq(i, j) = gram(cs.p[i], cs.q[j]);
  }
  for (Index i = 0; i < nq; ++i)
    for (Index j = 0; j < nq; ++j) cs.gqq(i, j) = gram(cs.q[i], cs.q[j]);
  cs.lip_q = 2.0 * largest_eigenvalue(cs.gqq);
  return cs;
}

struct InnerResult {
  double value = kInf;
  Vector w;
  double multiplier = 0.0;
  std::int64_t iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

// g(u) = min over ||w||_1 <= L ||u||_1 of u'Gpp u + 2 u'Gpq w + w'Gqq w,
// solved by accelerated projected gradient with function-value restarts.
class GammaInner {
 public:
  GammaInner(const ConeSplit& cs, double slack, double tol, std::int64_t cap)
      : cs_(cs), slack_(slack), tol_(tol), cap_(cap) {}

  InnerResult solve(const Vector& u, const Vector& warm) const {
    InnerResult r;
    const double base = u.dot(cs_.gpp * u);
    const auto nq = static_cast<Index>(cs_.q.size());
    if (nq == 0) {
      r.value = base;
      r.w = Vector(0);
      return r;
    }
    const double radius = slack_ * u.lpNorm<1>();
    const Vector b = cs_.gpq.transpose() * u;
    if (cs_.lip_q == 0.0) {
      r.value = base;
      r.w = Vector::Zero(nq);
      return r;
    }
    const double step = 1.0 / cs_.lip_q;
    auto objective = [&](const Vector& w, const Vector& gw) { return base + 2.0 * b.dot(w) + w.dot(gw); };

    Vector w = warm.size() == nq ? project_l1_ball(warm, radius) : Vector::Zero(nq);
    Vector gw = cs_.gqq * w;
    double fw = objective(w, gw);
    Vector y = w;
    Vector gy = gw;
    double t = 1.0;
    r.converged = false;
    std::int64_t it = 0;
    for (; it < cap_; ++it) {
      const Vector grad_y = 2.0 * (b + gy);
      Vector w_new = project_l1_ball(y - step * grad_y, radius);
      const double move = (w_new - y).norm();
      Vector gw_new = cs_.gqq * w_new;
      const double f_new = objective(w_new, gw_new);
      if (f_new > fw && t > 1.0) {
        y = w;
        gy = gw;
        t = 1.0;
        continue;
      }
      const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double momentum = (t - 1.0) / t_new;
      y = w_new + momentum * (w_new - w);
      gy = gw_new + momentum * (gw_new - gw);
      w = std::move(w_new);
      gw = std::move(gw_new);
      fw = f_new;
      t = t_new;
      if (move <= tol_) {
        const Vector grad_w = 2.0 * (b + gw);
        const double res = (w - project_l1_ball(w - step * grad_w, radius)).norm();
        if (res <= tol_) {
          r.residual = res;
          r.converged = true;
          ++it;
          break;
        }
      }
    }
    if (!r.converged) {
      const Vector grad_w = 2.0 * (b + gw);
      r.residual = (w - project_l1_ball(w - step * grad_w, radius)).norm();
    }
    r.iterations = it;
    r.value = fw;
    const Vector grad_w = 2.0 * (b + gw);
    r.multiplier = (radius > 0.0 && w.lpNorm<1>() >= radius * (1.0 - 1e-10))
                       ? grad_w.lpNorm<Eigen::Infinity>()
                       : 0.0;
    r.w = std::move(w);
    return r;
  }

  // Envelope gradient of g at u.
  [[nodiscard]] Vector gradient(const Vector& u, const InnerResult& r) const {
    Vector g = 2.0 * (cs_.gpp * u);
    if (r.w.size() > 0) g += 2.0 * (cs_.gpq * r.w);
    if (r.multiplier > 0.0)
      for (Index i = 0; i < u.size(); ++i)
        if (u(i) != 0.0) g(i) -= r.multiplier * slack_ * (u(i) > 0.0 ? 1.0 : -1.0);
    return g;
  }

 private:
  const ConeSplit& cs_;
  double slack_;
  double tol_;
  std::int64_t cap_;
};

struct StartOutcome {
  Vector u;
  InnerResult inner;
  double grad_norm = 0.0;
  std::int64_t iterations = 0;
  bool converged = true;
};

// Riemannian gradient descent on the unit sphere with Armijo backtracking.
StartOutcome descend_on_sphere(const GammaInner& inner, Vector u, const Vector& warm,
                               double initial_step) {
  StartOutcome out;
  InnerResult cur = inner.solve(u, warm);
  out.iterations += cur.iterations;
  bool all_inner_converged = cur.converged;
  double t = initial_step;
  int stall = 0;
  double grad_norm = 0.0;
  for (int iter = 0; iter < kMaxOuterIterations; ++iter) {
    const Vector g = inner.gradient(u, cur);
    const Vector gr = g - u.dot(g) * u;
    grad_norm = gr.norm();
    if (grad_norm < 1e-10) break;
    bool accepted = false;
    InnerResult trial;
    Vector u_try;
    while (t > 1e-16) {
      u_try = (u - t * gr).normalized();
      trial = inner.solve(u_try, cur.w);
      out.iterations += trial.iterations;
      if (trial.value <= cur.value - 1e-4 * t * grad_norm * grad_norm) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    all_inner_converged = all_inner_converged && trial.converged;
    const double decrease = cur.value - trial.value;
    u = std::move(u_try);
    cur = std::move(trial);
    t *= 2.0;
    if (decrease <= 1e-15 * std::max(1.0, std::abs(cur.value))) {
      if (++stall >= 10) break;
    } else {
      stall = 0;
    }
  }
  out.u = std::move(u);
  out.inner = std::move(cur);
  out.grad_norm = grad_norm;
  out.converged = all_inner_converged;
  return out;
}

SparseVector assemble_witness(const ConeSplit& cs, Index d, const Vector& u, const Vector& w) {
  Vector z = Vector::Zero(d);
  for (std::size_t i = 0; i < cs.p.size(); ++i) z(cs.p[i]) = u(static_cast<Index>(i));
  for (std::size_t i = 0; i < cs.q.size(); ++i) z(cs.q[i]) = w(static_cast<Index>(i));
  return SparseVector::from_dense(z);
}

Vector restrict_dense(const Vector& z, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = z(idx[i]);
  return out;
}

// Unit directions covering the half sphere in R^p (g(u) = g(-u)).
std::vector<Vector> half_sphere_grid(Index p, double step_deg) {
  std::vector<Vector> grid;
  const double step = step_deg * std::numbers::pi / 180.0;
  if (p == 1) {
    grid.push_back(Vector::Ones(1));
  } else if (p == 2) {
    for (double th = 0.0; th < std::numbers::pi - 1e-12; th += step) {
      Vector u(2);
      u << std::cos(th), std::sin(th);
      grid.push_back(u);
    }
  } else {
    const int rings = static_cast<int>(std::ceil(0.5 * std::numbers::pi / step - 1e-9));
    for (int r = 0; r <= rings; ++r) {
      const double polar = std::min(r * step, 0.5 * std::numbers::pi);
      const int count =
          r == 0 ? 1 : std::max(1, static_cast<int>(std::ceil(2.0 * std::numbers::pi * std::sin(polar) / step)));
      // Alternate the sweep direction so consecutive points stay close (warm starts).
      for (int a = 0; a < count; ++a) {
        const int k = (r % 2 == 0) ? a : count - 1 - a;
        const double az = 2.0 * std::numbers::pi * k / count;
        Vector u(3);
        u << std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar);
        grid.push_back(u);
      }
    }
  }
  return grid;
}

// Orthonormal basis of the tangent space at u.
Matrix tangent_basis(const Vector& u) {
  const Index p = u.size();
  const Matrix proj = Matrix::Identity(p, p) - u * u.transpose();
  // (I - uu') has rank p-1; the leading Q columns of a pivoted QR span its range.
  Eigen::ColPivHouseholderQR<Matrix> piv(proj);
  Matrix q = piv.householderQ() * Matrix::Identity(p, p);
  return q.leftCols(p - 1);
}

Certificate gamma_multistart(const DesignMatrix& x, const ConeSpec& cone, const ReOptions& opt) {
  const Matrix gram = x.scaled_gram();
  const ConeSplit cs = split_gram(gram, cone.support);
  const GammaInner inner(cs, cone.slack, opt.inner_tolerance, opt.iteration_cap);
  const auto np = static_cast<Index>(cs.p.size());
  const auto nq = static_cast<Index>(cs.q.size());
  const double lip = std::max(2.0 * largest_eigenvalue(gram), 1e-300);

  struct Candidate {
    Vector u;
    Vector w;
  };
  std::vector<Candidate> starts;
  for (int i = 0; i < opt.starts; ++i) {
    RandomStream rng(opt.seed.child(static_cast<std::uint64_t>(i)));
    starts.push_back({rng.unit_sphere(np), Vector::Zero(nq)});
  }
  for (const auto& z : opt.extra_starts) {
    if (z.dim() != x.cols()) throw InvalidSupportError("extra start has the wrong dimension");
    const Vector dense = z.to_dense();
    Vector u = restrict_dense(dense, cs.p);
    const double nu = u.norm();
    if (nu == 0.0) continue;
    starts.push_back({u / nu, restrict_dense(dense, cs.q) / nu});
  }

  Certificate cert;
  cert.kind = CertificateKind::kReGamma;
  cert.method = CertificateMethod::kMultistart;
  double best = kInf, worst = -kInf;
  StartOutcome best_outcome;
  bool all_converged = true;
  std::int64_t iterations = 0;
  for (const auto& start : starts) {
    StartOutcome o = descend_on_sphere(inner, start.u, start.w, 1.0 / lip);
    iterations += o.iterations;
    all_converged = all_converged && o.converged;
    worst = std::max(worst, o.inner.value);
    if (o.inner.value < best) {
      best = o.inner.value;
      best_outcome = std::move(o);
    }
  }
  const SparseVector witness = assemble_witness(cs, x.cols(), best_outcome.u, best_outcome.inner.w);
  cert.value = re_objective(x, witness, cone.support, ReMode::kGamma);
  cert.witness = witness;
  cert.report.iterations = iterations;
  cert.report.restarts = static_cast<int>(starts.size());
  cert.report.residual = best_outcome.grad_norm;
  cert.report.converged = all_converged;
  cert.report.spread = worst - best;
  return cert;
}

Certificate gamma_grid_oracle(const DesignMatrix& x, const ConeSpec& cone, const ReOptions& opt) {
  const Matrix gram = x.scaled_gram();
  const ConeSplit cs = split_gram(gram, cone.support);
  const GammaInner inner(cs, cone.slack, opt.inner_tolerance, opt.iteration_cap);
  const auto np = static_cast<Index>(cs.p.size());
  const auto nq = static_cast<Index>(cs.q.size());

  const std::vector<Vector> grid = half_sphere_grid(np, opt.grid_step_degrees);
  struct GridValue {
    double value;
    std::size_t index;
    Vector w;
  };
  std::vector<GridValue> values;
  values.reserve(grid.size());
  Vector warm = Vector::Zero(nq);
  std::int64_t iterations = 0;
  bool all_converged = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    InnerResult r = inner.solve(grid[i], warm);
    iterations += r.iterations;
    all_converged = all_converged && r.converged;
    warm = r.w;
    values.push_back({r.value, i, std::move(r.w)});
  }
  std::stable_sort(values.begin(), values.end(),
                   [](const GridValue& a, const GridValue& b) { return a.value < b.value; });

  // Compass search around the best grid points, derivative free.
  const double h0 = opt.grid_step_degrees * std::numbers::pi / 180.0;
  double best = kInf;
  Vector best_u, best_w;
  double final_step = 0.0;
  const std::size_t refine = std::min<std::size_t>(kRefineCandidates, values.size());
  for (std::size_t c = 0; c < refine; ++c) {
    Vector u = grid[values[c].index];
    InnerResult cur = inner.solve(u, values[c].w);
    iterations += cur.iterations;
    double h = np > 1 ? h0 : 0.0;
    while (h > 1e-7) {
      bool improved = false;
      const Matrix basis = tangent_basis(u);
      for (Index b = 0; b < basis.cols() && !improved; ++b) {
        for (double sign : {1.0, -1.0}) {
          Vector u_try = (std::cos(h) * u + std::sin(h) * sign * basis.col(b)).normalized();
          InnerResult r = inner.solve(u_try, cur.w);
          iterations += r.iterations;
          if (r.value < cur.value - 1e-15) {
            all_converged = all_converged && r.converged;
            u = std::move(u_try);
            cur = std::move(r);
            improved = true;
            break;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    if (cur.value < best) {
      best = cur.value;
      best_u = u;
      best_w = cur.w;
      final_step = h;
    }
  }

  Certificate cert;
  cert.kind = CertificateKind::kReGamma;
  cert.method = CertificateMethod::kGridOracle;
  const SparseVector witness = assemble_witness(cs, x.cols(), best_u, best_w);
  cert.value = re_objective(x, witness, cone.support, ReMode::kGamma);
  cert.witness = witness;
  cert.report.iterations = iterations;
  cert.report.restarts = static_cast<int>(refine);
  cert.report.residual = final_step;
  cert.report.converged = all_converged;
  cert.report.spread = values.empty() ? 0.0 : values.back().value - values.front().value;
  cert.note = "grid points: " + std::to_string(grid.size());
  return cert;
}

// Projected gradient on {z in cone, ||z|| = 1} for the full-norm denominator.
Certificate gamma_prime_multistart(const DesignMatrix& x, const ConeSpec& cone,
                                   const ReOptions& opt) {
  const Matrix gram = x.scaled_gram();
  const double lmax = largest_eigenvalue(gram);
  const Index d = x.cols();

  std::vector<Vector> starts;
  for (int i = 0; i < opt.starts; ++i) {
    RandomStream rng(opt.seed.child(static_cast<std::uint64_t>(i)));
    starts.push_back(rng.normal_vector(d));
  }
  for (const auto& z : opt.extra_starts) {
    if (z.dim() != d) throw InvalidSupportError("extra start has the wrong dimension");
    starts.push_back(z.to_dense());
  }

  Certificate cert;
  cert.kind = CertificateKind::kReGammaPrime;
  cert.method = CertificateMethod::kMultistart;
  double best = kInf, worst = -kInf;
  Vector best_z;
  double best_residual = 0.0;
  std::int64_t iterations = 0;
  bool all_converged = true;
  constexpr int kWindow = 100;
  for (const Vector& start : starts) {
    Vector z = project_onto_cone(start, cone);
    if (z.norm() == 0.0) continue;
    z.normalize();
    double f = z.dot(gram * z);
    double start_best = f;
    Vector start_best_z = z;
    double window_ref = f;
    double residual = 0.0;
    bool converged = false;
    std::int64_t it = 0;
    if (lmax == 0.0) converged = true;
    for (; it < opt.iteration_cap && !converged; ++it) {
      Vector z_new = project_onto_cone(z - (gram * z) / lmax, cone);
      const double nrm = z_new.norm();
      if (nrm == 0.0) break;
      z_new /= nrm;
      residual = (z_new - z).norm();
      z = std::move(z_new);
      f = z.dot(gram * z);
      if (f < start_best) {
        start_best = f;
        start_best_z = z;
      }
      if (residual <= 1e-13) converged = true;
      if ((it + 1) % kWindow == 0) {
        if (window_ref - start_best <= 1e-14 * std::max(1.0, std::abs(start_best))) converged = true;
        window_ref = start_best;
      }
    }
    iterations += it;
    all_converged = all_converged && converged;
    worst = std::max(worst, start_best);
    if (start_best < best) {
      best = start_best;
      best_z = start_best_z;
      best_residual = residual;
    }
  }
  if (best_z.size() == 0) throw DomainError("gamma_prime search found no feasible start");
  const SparseVector witness = SparseVector::from_dense(best_z);
  cert.value = re_objective(x, witness, cone.support, ReMode::kGammaPrime);
  cert.witness = witness;
  cert.report.iterations = iterations;
  cert.report.restarts = static_cast<int>(starts.size());
  cert.report.residual = best_residual;
  cert.report.converged = all_converged;
  cert.report.spread = worst - best;
  return cert;
}

}  // namespace

double re_objective(const DesignMatrix& x, const SparseVector& z, const SupportSet& s, ReMode mode) {
  if (z.dim() != x.cols() || s.dim() != x.cols())
    throw InvalidSupportError("dimension mismatch in re_objective");
  Vector xz = Vector::Zero(x.rows());
  double denom = 0.0;
  for (const auto& [j, v] : z.terms()) {
    xz += v * x.col(j);
    if (mode == ReMode::kGammaPrime || s.contains(j)) denom += v * v;
  }
  if (denom == 0.0) return kInf;
  return xz.squaredNorm() / static_cast<double>(x.rows()) / denom;
}

Certificate re_constant(const DesignMatrix& x, const ConeSpec& cone, ReMode mode, ReMethod method,
                        const ReOptions& options) {
  cone.validate();
  if (cone.support.dim() != x.cols())
    throw InvalidSupportError("cone support dimension does not match design width");
  if (options.starts < 0) throw DomainError("number of starts must be non-negative");
  if (options.starts == 0 && options.extra_starts.empty())
    throw DomainError("multistart needs at least one start");
  if (method == ReMethod::kGridOracle) {
    if (mode != ReMode::kGamma) throw DomainError("the grid oracle supports gamma mode only");
    if (cone.support.size() > 3 || x.cols() > 12)
      throw DomainError("the grid oracle requires |S'| <= 3 and d <= 12");
    if (!(options.grid_step_degrees > 0.0)) throw DomainError("grid step must be positive");
    return gamma_grid_oracle(x, cone, options);
  }
  if (mode == ReMode::kGamma) return gamma_multistart(x, cone, options);
  return gamma_prime_multistart(x, cone, options);
}

}  // namespace rotlasso
