#include "rotlasso/certificates.hpp"
#include "rotlasso/designs.hpp"
#include "rotlasso/harness.hpp"
#include "rotlasso/io.hpp"
#include "rotlasso/lasso.hpp"
#include "rotlasso/sparsify.hpp"
#include "rotlasso/version.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace rotlasso;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitError = 2;

/// Inline JSON text, or the path of a file holding it.
Json json_argument(const std::string& arg) {
  if (std::filesystem::exists(arg)) return parse_json(read_text_file(arg));
  return parse_json(arg);
}

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

std::string stem_path(const std::string& csv, const std::string& suffix) {
  std::filesystem::path p(csv);
  p.replace_extension();
  return p.string() + suffix;
}

Vector read_response(const std::string& path) {
  const std::string text = read_text_file(path);
  if (std::filesystem::path(path).extension() == ".json") return dense_vector_from_json(parse_json(text));
  const Matrix m = parse_matrix_csv(text);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError("response CSV must be a single row or column");
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind = "partial-rot";
  Index n = 100, d = 20, k = 2;
  std::string rotation = "haar";
  double sigma = 1.0;
  Index group_size = 4;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const SeedSpec seed{a.seed, 0};
  const RotationKind rot = parse_rotation(a.rotation, a.sigma);
  if (a.k < 1 || a.k > a.d) throw SizeError("k must lie in [1, d]");
  SupportSet s = SupportSet::range(a.d, 0, a.k);
  DesignMatrix x;
  if (a.kind == "partial-rot") {
    const DesignMatrix adv = correlated_block_design(a.n, a.d, s, BlockSpec::with_groups(s, 1), seed.child(1));
    x = partially_rotate(adv, s, rot, seed.child(2));
  } else if (a.kind == "semirandom") {
    const DesignMatrix adv = correlated_block_design(a.n, a.d, s, BlockSpec::with_groups(s, 1), seed.child(1));
    x = semirandom_gaussian_design(adv, s, seed.child(2));
  } else if (a.kind == "adversary") {
    const DesignMatrix base = gaussian_design(a.n, a.k, seed.child(1));
    RandomStream rng(seed.child(3));
    const Vector v = rng.normal_vector(a.n);
    Matrix adv(a.n, a.d - a.k);
    for (Index j = 0; j < adv.cols(); ++j) adv.col(j) = v;
    x = rotated_adversary_design(base, adv, rot, seed.child(2));
  } else if (a.kind == "counterexample") {
    CounterexampleDesign ce = counterexample_design(a.n, a.d, a.k, seed);
    x = std::move(ce.x);
    s = ce.support;
  } else if (a.kind == "correlated") {
    x = correlated_block_design(a.n, a.d, s, BlockSpec::contiguous(s, a.group_size, a.rho), seed);
  } else {
    throw SpecError("unknown design kind '" + a.kind + "'");
  }
  write_design(a.out, x, seed);
  write_text_file(stem_path(a.out, ".support.json"), to_json(s).dump(2) + "\n");
  std::cerr << "wrote " << a.out << " (" << x.rows() << " x " << x.cols() << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct CertArgs {
  std::string matrix;
  std::string what = "re";
  std::string support;
  Index s = 1;
  std::string method = "multistart";
  std::uint64_t cap = kDefaultEnumerationCap;
  std::uint64_t sample_pairs = 0;
  double slack = 1.0;
  int starts = 64;
  std::string rotation = "haar";
  double epsilon = 0.5;
  std::int64_t trials = 1000;
  std::string alpha, beta;
  std::uint64_t seed = 0;
  std::string out;
};

int run_cert(const CertArgs& a) {
  const DesignMatrix x = read_design(a.matrix);
  const SeedSpec seed{a.seed, 0};
  const auto support = [&]() {
    if (a.support.empty()) throw InvalidSupportError("--support is required for --what " + a.what);
    return support_from_json(json_argument(a.support), x.cols());
  };
  Json out;
  if (a.what == "re" || a.what == "re-prime") {
    ReOptions opts;
    opts.seed = seed;
    opts.starts = a.starts;
    const ReMethod method = a.method == "oracle" ? ReMethod::kGridOracle : ReMethod::kMultistart;
    if (a.method != "oracle" && a.method != "multistart")
      throw SpecError("--method must be multistart or oracle");
    out = to_json(re_constant(x, ConeSpec{support(), a.slack},
                              a.what == "re" ? ReMode::kGamma : ReMode::kGammaPrime, method, opts));
  } else if (a.what == "lambda-min") {
    out = to_json(lambda_min_restricted(x, support()));
  } else if (a.what == "rno") {
    const SupportSet s = support();
    out = to_json(a.sample_pairs > 0 ? rno_constant_sampled(x, s, a.s, a.sample_pairs, seed)
                                     : rno_constant(x, s, a.s, a.cap));
  } else if (a.what == "rip") {
    const DesignMatrix unit = unit_column_scaling(x);
    Certificate c = a.sample_pairs > 0 ? rip_constant_sampled(unit, a.s, a.sample_pairs, seed)
                                       : rip_constant(unit, a.s, a.cap);
    c.note = (c.note.empty() ? "" : c.note + "; ") + std::string("computed on X / sqrt(n)");
    out = to_json(c);
  } else if (a.what == "rot-check") {
    const SupportSet s = support();
    const SparseVector alpha = a.alpha.empty() ? SparseVector(s.size(), {{0, 1.0}})
                                               : sparse_vector_from_json(json_argument(a.alpha));
    const SparseVector beta = a.beta.empty() ? SparseVector(x.cols() - s.size(), {{0, 1.0}})
                                             : sparse_vector_from_json(json_argument(a.beta));
    const RotationKind kind = parse_rotation(a.rotation);
    const DesignMatrix base = x.normalized() ? x : normalize_columns(x);
    const FailureRate fr = partial_rotation_failure_rate(
        [&](const SeedSpec& sd) { return partially_rotate(base, s, kind, sd); }, s, alpha, beta,
        a.epsilon, a.trials, seed);
    out = Json{{"kind", "rot_check"},
               {"value", fr.rate},
               {"exceedances", fr.exceedances},
               {"trials", fr.trials},
               {"epsilon", a.epsilon},
               {"rotation", a.rotation}};
  } else {
    throw SpecError("unknown --what '" + a.what + "'");
  }
  emit(out, a.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct SparsifyArgs {
  std::string matrix;
  std::string beta;
  Index s = 1;
  int max_attempts = kDefaultSparsifyAttempts;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sparsify(const SparsifyArgs& a) {
  const DesignMatrix x = read_design(a.matrix);
  const SparseVector beta = sparse_vector_from_json(json_argument(a.beta));
  try {
    emit(to_json(maurey_sparsify(x, beta, a.s, SeedSpec{a.seed, 0}, a.max_attempts)), a.out);
  } catch (const SparsifyFailure& f) {
    Json j = to_json(f.best());
    j["failed"] = true;
    emit(j, a.out);
    throw;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct LassoArgs {
  std::string matrix;
  std::string y;
  std::optional<double> radius;
  double sigma = 0.0;
  std::string beta;
  std::string step_rule = "constant";
  std::uint64_t seed = 0;
  std::string out;
};

int run_lasso(const LassoArgs& a) {
  const DesignMatrix x = read_design(a.matrix);
  std::optional<SparseVector> beta;
  if (!a.beta.empty()) beta = sparse_vector_from_json(json_argument(a.beta));
  RegressionInstance inst;
  if (a.y == "synthesize") {
    if (!beta) throw SpecError("--y synthesize needs --beta");
    inst = synth_response(x, *beta, a.sigma, SeedSpec{a.seed, 0});
  } else {
    if (!a.radius) throw SpecError("--radius is required when --y is a file");
    inst = RegressionInstance{x, read_response(a.y), beta, a.sigma, SeedSpec{a.seed, 0}};
  }
  const double radius = a.radius ? *a.radius : beta->l1_norm();
  LassoOptions opts;
  if (a.step_rule == "accelerated") opts.step_rule = StepRule::kAcceleratedMonotone;
  else if (a.step_rule != "constant") throw SpecError("--step-rule must be constant or accelerated");
  const LassoSolution sol = lasso_constrained(inst, radius, opts);
  Json out{{"beta_hat", to_json(sol.beta_hat)},
           {"radius", sol.radius},
           {"objective", sol.objective},
           {"converged", sol.converged},
           {"iterations", sol.iterations},
           {"optimality_residual", sol.optimality_residual}};
  if (beta) {
    out["prediction_error"] = prediction_error(x, sol.beta_hat, beta->to_dense());
    const ParameterErrors pe = parameter_errors(sol.beta_hat, *beta, beta->support());
    out["parameter_errors"] = Json{{"l1", pe.l1}, {"l2_restricted", pe.l2_restricted}};
  }
  emit(out, a.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct ExpArgs {
  std::string name;
  std::string config;
  std::string out_dir = "results";
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

int run_exp(const ExpArgs& a) {
  std::vector<std::string> names;
  if (a.name == "all") names = experiment_names();
  else names.push_back(a.name);
  if (a.name == "all" && !a.config.empty())
    throw SpecError("--config applies to a single experiment, not 'all'");

  bool hard_ok = true;
  for (const auto& name : names) {
    ExperimentSpec spec = a.config.empty() ? default_spec(name)
                                           : spec_from_json(json_argument(a.config), name);
    if (a.seed) spec.master_seed = *a.seed;
    spec.workers = a.workers;
    spec.validate();
    const auto rows = run_experiment(spec);
    const EmittedFiles files = emit_results(spec, rows, a.out_dir);
    const auto checks = summary_checks(spec, rows);
    std::size_t ok = 0;
    for (const auto& c : checks) ok += c.pass ? 1 : 0;
    std::cout << name << ": " << rows.size() << " rows, " << ok << "/" << checks.size()
              << " summary checks pass -> " << files.csv << "\n";
    if (is_hard_inequality(name) && ok != checks.size()) hard_ok = false;
  }
  return hard_ok ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially-rotated design certificates, sparsification and Lasso experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a design matrix (CSV + JSON sidecar + support)");
  g->add_option("--kind", gen.kind)
      ->check(CLI::IsMember({"partial-rot", "semirandom", "adversary", "counterexample", "correlated"}));
  g->add_option("--n", gen.n)->check(CLI::PositiveNumber);
  g->add_option("--d", gen.d)->check(CLI::PositiveNumber);
  g->add_option("--k", gen.k)->check(CLI::PositiveNumber);
  g->add_option("--rotation", gen.rotation)->check(CLI::IsMember({"haar", "gaussian", "rademacher"}));
  g->add_option("--rotation-sigma", gen.sigma);
  g->add_option("--group-size", gen.group_size)->check(CLI::PositiveNumber);
  g->add_option("--rho", gen.rho)->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("--out", gen.out, "Output CSV path")->required();

  CertArgs cert;
  auto* c = app.add_subcommand("cert", "Compute a certificate for a design");
  c->add_option("--matrix", cert.matrix)->required();
  c->add_option("--what", cert.what)
      ->check(CLI::IsMember({"re", "re-prime", "rno", "rip", "lambda-min", "rot-check"}));
  c->add_option("--support", cert.support, "Support JSON (inline or file)");
  c->add_option("--s", cert.s)->check(CLI::PositiveNumber);
  c->add_option("--method", cert.method)->check(CLI::IsMember({"multistart", "oracle"}));
  c->add_option("--cap", cert.cap, "Enumeration cap");
  c->add_option("--sample-pairs", cert.sample_pairs, "Sample this many supports (lower bound)");
  c->add_option("--slack", cert.slack, "Cone slack L");
  c->add_option("--starts", cert.starts)->check(CLI::PositiveNumber);
  c->add_option("--rotation", cert.rotation)->check(CLI::IsMember({"haar", "gaussian", "rademacher"}));
  c->add_option("--epsilon", cert.epsilon);
  c->add_option("--trials", cert.trials)->check(CLI::PositiveNumber);
  c->add_option("--alpha", cert.alpha);
  c->add_option("--beta", cert.beta);
  c->add_option("--seed", cert.seed);
  c->add_option("--out", cert.out);

  SparsifyArgs sp;
  auto* s = app.add_subcommand("sparsify", "Maurey sparsification of beta");
  s->add_option("--matrix", sp.matrix)->required();
  s->add_option("--beta", sp.beta, "Beta JSON (inline or file)")->required();
  s->add_option("--s", sp.s)->required()->check(CLI::PositiveNumber);
  s->add_option("--max-attempts", sp.max_attempts)->check(CLI::PositiveNumber);
  s->add_option("--seed", sp.seed);
  s->add_option("--out", sp.out);

  LassoArgs la;
  auto* l = app.add_subcommand("lasso", "Constrained Lasso");
  l->add_option("--matrix", la.matrix)->required();
  l->add_option("--y", la.y, "Response file, or 'synthesize'")->required();
  l->add_option("--radius", la.radius);
  l->add_option("--sigma", la.sigma)->check(CLI::NonNegativeNumber);
  l->add_option("--beta", la.beta, "True beta JSON (inline or file)");
  l->add_option("--step-rule", la.step_rule)->check(CLI::IsMember({"constant", "accelerated"}));
  l->add_option("--seed", la.seed);
  l->add_option("--out", la.out);

  ExpArgs ex;
  auto* e = app.add_subcommand("exp", "Run a seeded experiment and write CSV + summary JSON");
  std::vector<std::string> choices = experiment_names();
  choices.push_back("all");
  e->add_option("name", ex.name)->required()->check(CLI::IsMember(choices));
  e->add_option("--config", ex.config, "Experiment config JSON (inline or file)");
  e->add_option("--out-dir", ex.out_dir);
  e->add_option("--workers", ex.workers)->check(CLI::PositiveNumber);
  e->add_option("--seed", ex.seed, "Master seed override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) return run_gen(gen);
    if (c->parsed()) return run_cert(cert);
    if (s->parsed()) return run_sparsify(sp);
    if (l->parsed()) return run_lasso(la);
    if (e->parsed()) return run_exp(ex);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
