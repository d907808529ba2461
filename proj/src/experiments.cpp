#include "rotlasso/certificates.hpp"
#include "rotlasso/designs.hpp"
#include "rotlasso/harness.hpp"
#include "rotlasso/lasso.hpp"
#include "rotlasso/sparsify.hpp"
#include "trial_pool.hpp"

#include <cmath>
#include <limits>

namespace rotlasso {

namespace {

// Sub-stream tags shared by the runners.
enum Tag : std::uint64_t {
  kAdversary = 1,
  kReplace = 2,
  kSolverA = 3,
  kSolverB = 4,
  kSigns = 5,
  kNoise = 6,
  kBaseline = 7,
  kRotation = 8,
};

ReOptions solver_options(const SeedSpec& seed) {
  ReOptions o;
  o.seed = seed;
  return o;
}

/// Model 1 on top of an adversarial S^c: the S columns are fresh Gaussians.
DesignMatrix semirandom_design(const GridPoint& p, const SupportSet& s, const SeedSpec& seed) {
  if (p.design == "orthonormal") return orthonormal_design(p.n, p.d);
  if (p.design == "gaussian") return gaussian_design(p.n, p.d, seed.child(kAdversary));
  BlockSpec blocks;
  if (p.design == "duplicated") blocks = BlockSpec::with_groups(s, 1, p.rho);
  else if (p.design == "grouped") blocks = BlockSpec::contiguous(s, p.group_size, p.rho);
  else throw SpecError("design '" + p.design + "' is not available for this experiment");
  const DesignMatrix adversary = correlated_block_design(p.n, p.d, s, blocks, seed.child(kAdversary));
  return semirandom_gaussian_design(adversary, s, seed.child(kReplace));
}

/// S columns Gaussian; S^c column k + j copies S column j mod k.
DesignMatrix boundary_duplicate_design(Index n, Index d, Index k, const SeedSpec& seed) {
  const DesignMatrix g = gaussian_design(n, k, seed);
  Matrix m(n, d);
  for (Index j = 0; j < d; ++j) m.col(j) = g.col(j % k);
  return DesignMatrix(std::move(m), true);
}

std::vector<ExperimentRow> one(ExperimentRow row) { return {std::move(row)}; }

}  // namespace

std::vector<ExperimentRow> run_thm_main(const ExperimentSpec& spec) {
  return run_trials(spec, [](const GridPoint& p, const SeedSpec& seed) {
    const SupportSet s = SupportSet::range(p.d, 0, p.k);
    const DesignMatrix x = semirandom_design(p, s, seed);
    const DesignMatrix xs = restrict_columns(x, s);
    const Certificate small = re_constant(xs, ConeSpec{SupportSet::all(p.k), 1.0}, ReMode::kGamma,
                                          ReMethod::kMultistart, solver_options(seed.child(kSolverA)));
    const Certificate full = re_constant(x, ConeSpec{s, 1.0}, ReMode::kGamma, ReMethod::kMultistart,
                                         solver_options(seed.child(kSolverB)));
    ExperimentRow row;
    row.set(Measure::kGammaXs, small.value);
    row.set(Measure::kGammaX, full.value);
    row.set(Measure::kRatio, full.value / small.value);
    row.set(Measure::kConverged, small.report.converged && full.report.converged ? 1.0 : 0.0);

    const Index sparsity = std::min({p.s, s.size(), p.d - p.k});
    const double eps = rno_constant(x, s, sparsity).value;
    row.set(Measure::kRnoEps, eps);
    if (small.value > 0.0) {
      row.set(Measure::kReLowerC2, rno_to_re_lower_bound(eps, sparsity, p.k, small.value, 2.0));
      row.set(Measure::kReLowerC4, rno_to_re_lower_bound(eps, sparsity, p.k, small.value, 4.0));
      row.set(Measure::kReLowerC8, rno_to_re_lower_bound(eps, sparsity, p.k, small.value, 8.0));
      const double root = std::sqrt(static_cast<double>(p.k) /
                                    (small.value * static_cast<double>(sparsity)));
      row.set(Measure::kCFit, (1.0 - eps - full.value / small.value) / root);
    }
    return one(std::move(row));
  });
}

std::vector<ExperimentRow> run_lasso_rate(const ExperimentSpec& spec) {
  return run_trials(spec, [](const GridPoint& p, const SeedSpec& seed) {
    const SupportSet s = SupportSet::range(p.d, 0, p.k);
    const DesignMatrix x = semirandom_design(p, s, seed);

    RandomStream signs(seed.child(kSigns));
    std::vector<SparseVector::Term> terms;
    for (Index j : s.indices()) terms.emplace_back(j, signs.rademacher());
    const SparseVector beta(p.d, std::move(terms));
    const Vector dense = beta.to_dense();
    const double radius = beta.l1_norm();
    const double log_d = std::log(static_cast<double>(p.d));
    const double scale = p.sigma * p.sigma * static_cast<double>(p.k) * log_d / static_cast<double>(p.n);

    const RegressionInstance inst = synth_response(x, beta, p.sigma, seed.child(kNoise));
    const LassoSolution sol = lasso_constrained(inst, radius);
    const double gamma_hat = lambda_min_restricted(x, s).value;

    // Paired baseline: fully Gaussian design, same beta and the same noise draw.
    const DesignMatrix xg = gaussian_design(p.n, p.d, seed.child(kBaseline));
    const RegressionInstance base = synth_response(xg, beta, p.sigma, seed.child(kNoise));
    const LassoSolution base_sol = lasso_constrained(base, radius);
    const double gamma_base = lambda_min_restricted(xg, s).value;

    ExperimentRow row;
    row.set(Measure::kGammaXs, gamma_hat);
    row.set(Measure::kPredError, prediction_error(x, sol.beta_hat, dense));
    row.set(Measure::kTheoryBound, scale / gamma_hat);
    row.set(Measure::kBaselinePredError, prediction_error(xg, base_sol.beta_hat, dense));
    row.set(Measure::kBaselineTheoryBound, scale / gamma_base);
    const ParameterErrors errs = parameter_errors(sol.beta_hat, beta, s);
    row.set(Measure::kL1Error, errs.l1);
    row.set(Measure::kL2Restricted, errs.l2_restricted);
    row.set(Measure::kLassoIterations, static_cast<double>(sol.iterations));
    row.set(Measure::kConverged, sol.converged && base_sol.converged ? 1.0 : 0.0);
    return one(std::move(row));
  });
}

std::vector<ExperimentRow> run_rno_whp(const ExperimentSpec& spec) {
  return run_trials(spec, [](const GridPoint& p, const SeedSpec& seed) {
    const SupportSet s = SupportSet::range(p.d, 0, p.k);
    const DesignMatrix base = boundary_duplicate_design(p.n, p.d, p.k, seed.child(kAdversary));
    const DesignMatrix x = partially_rotate(base, s, parse_rotation(p.rotation), seed.child(kRotation));
    std::vector<ExperimentRow> rows(1);
    rows[0].set(Measure::kRnoEps, rno_constant(x, s, p.s).value);
    if (p.control) {
      ExperimentRow ctrl;
      ctrl.control = true;
      ctrl.set(Measure::kRnoEps, rno_constant(base, s, p.s).value);
      rows.push_back(std::move(ctrl));
    }
    return rows;
  });
}

std::vector<ExperimentRow> run_rip_rno(const ExperimentSpec& spec) {
  return run_trials(spec, [](const GridPoint& p, const SeedSpec& seed) {
    DesignMatrix x;
    if (p.design == "orthonormal") {
      x = orthonormal_design(p.n, p.d);
    } else if (p.design == "gaussian" || p.design == "dup-pair") {
      x = gaussian_design(p.n, p.d, seed.child(kAdversary));
      if (p.design == "dup-pair") {
        Matrix m = x.entries();
        m.col(1) = m.col(0);
        x = DesignMatrix(std::move(m), true);
      }
    } else {
      throw SpecError("design '" + p.design + "' is not available for rip-rno");
    }
    const Index width = std::min(2 * p.s, p.d);
    const double delta = rip_constant(unit_column_scaling(x), width).value;
    const double bound =
        delta < 1.0 ? rip_to_rno_bound(delta) : std::numeric_limits<double>::infinity();

    double worst = 0.0;
    std::int64_t checked = 0;
    for (Index size = 1; size <= p.max_support; ++size) {
      for_each_combination(p.d, size, [&](const std::vector<Index>& idx) {
        const SupportSet s(p.d, idx);
        worst = std::max(worst, rno_constant(x, s, p.s).value);
        ++checked;
      });
    }
    ExperimentRow row;
    row.set(Measure::kRipDelta, delta);
    row.set(Measure::kRnoBound, bound);
    row.set(Measure::kRnoEps, worst);
    row.set(Measure::kSupportsChecked, static_cast<double>(checked));
    return one(std::move(row));
  });
}

std::vector<ExperimentRow> run_counterexample(const ExperimentSpec& spec) {
  return run_trials(spec, [](const GridPoint& p, const SeedSpec& seed) {
    const CounterexampleDesign ce = counterexample_design(p.n, p.d, p.k, seed.child(kAdversary));
    const DesignMatrix xs = restrict_columns(ce.x, ce.support);
    const ConeSpec whole{SupportSet::all(p.k), 1.0};
    const ConeSpec cone{ce.support, 1.0};
    const Certificate small =
        re_constant(xs, whole, ReMode::kGammaPrime, ReMethod::kMultistart, solver_options(seed.child(kSolverA)));
    const Certificate full =
        re_constant(ce.x, cone, ReMode::kGammaPrime, ReMethod::kMultistart, solver_options(seed.child(kSolverB)));
    const Certificate classic =
        re_constant(ce.x, cone, ReMode::kGamma, ReMethod::kMultistart, solver_options(seed.child(kSolverB)));
    ExperimentRow row;
    row.set(Measure::kGammaPrimeXs, small.value);
    row.set(Measure::kGammaPrimeX, full.value);
    row.set(Measure::kWitnessRatio, re_objective(ce.x, counterexample_witness(p.d, p.k), ce.support,
                                                 ReMode::kGammaPrime));
    row.set(Measure::kGammaX, classic.value);
    row.set(Measure::kConverged,
            small.report.converged && full.report.converged && classic.report.converged ? 1.0 : 0.0);
    return one(std::move(row));
  });
}

std::vector<ExperimentRow> run_sparsify_bound(const ExperimentSpec& spec) {
  return run_trials(spec, [](const GridPoint& p, const SeedSpec& seed) {
    const DesignMatrix x = gaussian_design(p.n, p.d, seed.child(kAdversary));
    RandomStream rng(seed.child(kSigns));
    const Vector beta = rng.normal_vector(p.d);
    ExperimentRow row;
    try {
      const SparsifyResult r = maurey_sparsify(x, beta, p.s, seed.child(kSolverA));
      row.set(Measure::kSparsifyError, r.error);
      row.set(Measure::kSparsifyBound, r.bound);
      row.set(Measure::kAttempts, r.attempts);
    } catch (const SparsifyFailure& f) {
      row.set(Measure::kSparsifyError, f.best().error);
      row.set(Measure::kSparsifyBound, f.best().bound);
      row.set(Measure::kAttempts, f.best().attempts);
    }
    return one(std::move(row));
  });
}

std::vector<ExperimentRow> run_rot_check(const ExperimentSpec& spec) {
  return run_trials(spec, [](const GridPoint& p, const SeedSpec& seed) {
    const SupportSet s = SupportSet::range(p.d, 0, p.k);
    const DesignMatrix base = boundary_duplicate_design(p.n, p.d, p.k, seed.child(kAdversary));
    const RotationKind kind = parse_rotation(p.rotation);
    const DesignGenerator generate = [&](const SeedSpec& sd) {
      return partially_rotate(base, s, kind, sd);
    };
    // Without rotation these two combinations coincide.
    const SparseVector alpha(p.k, {{0, 1.0}});
    const SparseVector beta(p.d - p.k, {{0, 1.0}});
    const FailureRate fr = partial_rotation_failure_rate(generate, s, alpha, beta, p.epsilon,
                                                         p.inner_trials, seed.child(kRotation));
    ExperimentRow row;
    row.set(Measure::kExceedances, static_cast<double>(fr.exceedances));
    row.set(Measure::kInnerTrials, static_cast<double>(fr.trials));
    row.set(Measure::kRate, fr.rate);
    return one(std::move(row));
  });
}

}  // namespace rotlasso
