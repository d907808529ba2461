#include "rotlasso/harness.hpp"

#include "rotlasso/designs.hpp"
#include "rotlasso/version.hpp"
#include "trial_pool.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace rotlasso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool known_experiment(const std::string& name) {
  const auto& names = experiment_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::int64_t trials_for(const ExperimentSpec& spec, const GridPoint& p) {
  return p.trials > 0 ? p.trials : spec.trials;
}

GridPoint point_from_json(const Json& j, const GridPoint& defaults) {
  GridPoint p = defaults;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") p.n = value.get<Index>();
      else if (key == "d") p.d = value.get<Index>();
      else if (key == "k") p.k = value.get<Index>();
      else if (key == "s") p.s = value.get<Index>();
      else if (key == "sigma") p.sigma = value.get<double>();
      else if (key == "rotation") p.rotation = value.get<std::string>();
      else if (key == "design") p.design = value.get<std::string>();
      else if (key == "group_size") p.group_size = value.get<Index>();
      else if (key == "rho") p.rho = value.get<double>();
      else if (key == "epsilon") p.epsilon = value.get<double>();
      else if (key == "c_const") p.c_const = value.get<double>();
      else if (key == "trials") p.trials = value.get<std::int64_t>();
      else if (key == "inner_trials") p.inner_trials = value.get<std::int64_t>();
      else if (key == "max_support") p.max_support = value.get<Index>();
      else if (key == "threshold") p.threshold = value.get<double>();
      else if (key == "control") p.control = value.get<bool>();
      else throw SpecError("unknown grid field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed grid point: ") + e.what());
  }
  return p;
}

std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec
// ---------------------------------------------------------------------------

void ExperimentSpec::validate() const {
  if (!known_experiment(name)) throw SpecError("unknown experiment '" + name + "'");
  if (grid.empty()) throw SpecError("experiment grid is empty");
  if (trials < 1) throw SpecError("trials must be at least 1");
  if (workers < 1) throw SpecError("workers must be at least 1");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GridPoint& p = grid[i];
    const std::string at = " (grid point " + std::to_string(i) + ")";
    if (p.n < 1 || p.d < 1) throw SpecError("n and d must be positive" + at);
    if (p.k < 1 || p.k > p.d) throw SpecError("k must lie in [1, d]" + at);
    if (p.s < 1) throw SpecError("s must be positive" + at);
    if (!(p.sigma >= 0.0)) throw SpecError("sigma must be non-negative" + at);
    if (!(p.epsilon > 0.0)) throw SpecError("epsilon must be positive" + at);
    if (!(p.c_const > 0.0)) throw SpecError("C must be positive" + at);
    if (p.group_size < 1) throw SpecError("group_size must be positive" + at);
    if (!(p.rho >= 0.0)) throw SpecError("rho must be non-negative" + at);
    if (p.trials < 0) throw SpecError("per-point trials must be non-negative" + at);
    parse_rotation(p.rotation);
    if (name == "rot-check" && p.inner_trials < 1)
      throw SpecError("rot-check needs inner_trials >= 1" + at);
    if (name == "rot-check" && 2 * p.k > p.d) throw SpecError("rot-check needs d >= 2k" + at);
    if (name == "rip-rno" && (p.max_support < 1 || p.max_support >= p.d))
      throw SpecError("max_support must lie in [1, d)" + at);
    if (name == "counterexample" && (p.d < p.k + 2 || p.n < p.k + 2))
      throw SpecError("counterexample needs n, d >= k + 2" + at);
    if ((name == "thm-main" || name == "lasso-rate" || name == "rno-whp") && p.k >= p.d)
      throw SpecError("the complement of S must be non-empty" + at);
    if (p.design == "orthonormal" && p.n < p.d)
      throw SpecError("an orthonormal design needs n >= d" + at);
  }
}

Json to_json(const GridPoint& p) {
  return Json{{"n", p.n},
              {"d", p.d},
              {"k", p.k},
              {"s", p.s},
              {"sigma", p.sigma},
              {"rotation", p.rotation},
              {"design", p.design},
              {"group_size", p.group_size},
              {"rho", p.rho},
              {"epsilon", p.epsilon},
              {"c_const", p.c_const},
              {"trials", p.trials},
              {"inner_trials", p.inner_trials},
              {"max_support", p.max_support},
              {"threshold", p.threshold},
              {"control", p.control}};
}

Json to_json(const ExperimentSpec& spec) {
  Json grid = Json::array();
  for (const auto& p : spec.grid) grid.push_back(to_json(p));
  return Json{{"name", spec.name},
              {"trials", spec.trials},
              {"master_seed", spec.master_seed},
              {"grid", grid}};
}

ExperimentSpec spec_from_json(const Json& j, const std::string& name_hint) {
  if (!j.is_object()) throw SpecError("experiment config must be a JSON object");
  std::string name = name_hint;
  if (j.contains("name")) {
    const auto given = j["name"].get<std::string>();
    if (!name.empty() && given != name)
      throw SpecError("config names experiment '" + given + "' but '" + name + "' was requested");
    name = given;
  }
  if (!known_experiment(name)) throw SpecError("unknown experiment '" + name + "'");
  ExperimentSpec spec = default_spec(name);
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "name") continue;
      if (key == "trials") spec.trials = value.get<std::int64_t>();
      else if (key == "master_seed") spec.master_seed = value.get<std::uint64_t>();
      else if (key == "workers") spec.workers = value.get<int>();
      else if (key == "grid") {
        if (!value.is_array()) throw SpecError("grid must be an array");
        // Missing fields fall back to the first default grid point.
        const GridPoint base = spec.grid.empty() ? GridPoint{} : spec.grid.front();
        spec.grid.clear();
        for (const auto& p : value) spec.grid.push_back(point_from_json(p, base));
      } else {
        throw SpecError("unknown config field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed experiment config: ") + e.what());
  }
  spec.validate();
  return spec;
}

ExperimentSpec default_spec(const std::string& name) {
  ExperimentSpec spec;
  spec.name = name;
  spec.master_seed = 20240601;
  if (name == "thm-main") {
    spec.trials = 50;
    GridPoint p;
    p.n = 200;
    p.d = 64;
    p.k = 3;
    p.s = 2;
    p.design = "duplicated";
    p.threshold = 0.9 * 0.99;
    spec.grid.push_back(p);
    GridPoint ortho = p;
    ortho.n = 64;
    ortho.design = "orthonormal";
    ortho.trials = 1;
    spec.grid.push_back(ortho);
  } else if (name == "lasso-rate") {
    spec.trials = 20;
    for (Index k : {2, 4, 8}) {
      for (Index n : {100, 200, 400}) {
        GridPoint p;
        p.n = n;
        p.d = 128;
        p.k = k;
        p.sigma = 1.0;
        p.design = "grouped";
        p.group_size = 4;
        p.threshold = 30.0;
        spec.grid.push_back(p);
      }
    }
  } else if (name == "rno-whp") {
    spec.trials = 100;
    for (Index n : {100, 200, 400}) {
      GridPoint p;
      p.n = n;
      p.d = 20;
      p.k = 5;
      p.s = 2;
      p.rotation = "haar";
      p.threshold = 0.5;
      p.control = true;
      spec.grid.push_back(p);
    }
  } else if (name == "rip-rno") {
    spec.trials = 100;
    GridPoint p;
    p.n = 60;
    p.d = 12;
    p.s = 2;
    p.design = "gaussian";
    p.max_support = 4;
    spec.grid.push_back(p);
    GridPoint ortho = p;
    ortho.design = "orthonormal";
    ortho.trials = 1;
    spec.grid.push_back(ortho);
    GridPoint dup = p;
    dup.design = "dup-pair";
    dup.trials = 1;
    spec.grid.push_back(dup);
  } else if (name == "counterexample") {
    spec.trials = 1;
    for (Index k : {4, 10, 20}) {
      GridPoint p;
      p.n = 100;
      p.k = k;
      p.d = k + 6;
      spec.grid.push_back(p);
    }
  } else if (name == "sparsify-bound") {
    spec.trials = 250;
    const std::pair<Index, Index> sizes[] = {{30, 50}, {100, 200}};
    for (const auto& [n, d] : sizes) {
      for (Index s : {d / 10, d / 2}) {
        GridPoint p;
        p.n = n;
        p.d = d;
        p.s = s;
        p.design = "gaussian";
        spec.grid.push_back(p);
      }
    }
  } else if (name == "rot-check") {
    spec.trials = 1;
    GridPoint p;
    p.d = 4;
    p.k = 2;
    p.rotation = "haar";
    const struct {
      Index n;
      double eps;
      std::int64_t inner;
      double threshold;
    } rows[] = {{100, 0.5, 10000, 2.0}, {100, 0.2, 1000, -1.0}, {400, 0.2, 1000, -1.0},
                {100, 1.0, 1000, 0.0}};
    for (const auto& r : rows) {
      GridPoint q = p;
      q.n = r.n;
      q.epsilon = r.eps;
      q.inner_trials = r.inner;
      q.threshold = r.threshold;
      spec.grid.push_back(q);
    }
  } else {
    throw SpecError("unknown experiment '" + name + "'");
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Rows and pass flags
// ---------------------------------------------------------------------------

const std::array<const char*, kMeasureCount>& measure_names() {
  static const std::array<const char*, kMeasureCount> names{
      "gamma_x",     "gamma_xs",         "ratio",
      "converged",   "rno_eps",          "rip_delta",
      "rno_bound",   "re_lower_c2",      "re_lower_c4",
      "re_lower_c8", "c_fit",            "pred_error",
      "theory_bound", "baseline_pred_error", "baseline_theory_bound",
      "l1_error",    "l2_restricted",    "lasso_iterations",
      "gamma_prime_x", "gamma_prime_xs", "witness_ratio",
      "sparsify_error", "sparsify_bound", "attempts",
      "exceedances", "inner_trials",     "rate",
      "supports_checked"};
  return names;
}

double ExperimentRow::at(Measure m) const {
  const auto v = get(m);
  return v ? *v : kNaN;
}

std::string to_string(PassState p) {
  switch (p) {
    case PassState::kPass: return "pass";
    case PassState::kFail: return "fail";
    case PassState::kIndeterminate: return "indeterminate";
    case PassState::kNotApplicable: return "na";
  }
  return "na";
}

PassState recompute_pass(const ExperimentRow& row) {
  const auto verdict = [](bool ok) { return ok ? PassState::kPass : PassState::kFail; };
  const auto has = [&](std::initializer_list<Measure> ms) {
    for (Measure m : ms)
      if (!row.get(m)) return false;
    return true;
  };
  const double thr = row.coords.threshold;
  const std::string& e = row.experiment;
  if (e == "thm-main") {
    if (!has({Measure::kRatio, Measure::kConverged})) return PassState::kIndeterminate;
    if (row.at(Measure::kConverged) == 0.0) return PassState::kIndeterminate;
    return verdict(row.at(Measure::kRatio) >= thr);
  }
  if (e == "lasso-rate") {
    if (!has({Measure::kPredError, Measure::kTheoryBound})) return PassState::kIndeterminate;
    const double bound = row.at(Measure::kTheoryBound);
    if (bound == 0.0) return verdict(row.at(Measure::kPredError) <= 1e-8);
    return verdict(row.at(Measure::kPredError) <= thr * bound);
  }
  if (e == "rno-whp") {
    if (!has({Measure::kRnoEps})) return PassState::kIndeterminate;
    if (row.control) return verdict(row.at(Measure::kRnoEps) >= 1.0 - 1e-9);
    return verdict(row.at(Measure::kRnoEps) <= thr);
  }
  if (e == "rip-rno") {
    if (!has({Measure::kRnoEps, Measure::kRnoBound})) return PassState::kIndeterminate;
    return verdict(row.at(Measure::kRnoEps) <= row.at(Measure::kRnoBound) + 1e-9);
  }
  if (e == "counterexample") {
    if (!has({Measure::kGammaPrimeX, Measure::kGammaPrimeXs, Measure::kWitnessRatio}))
      return PassState::kIndeterminate;
    return verdict(std::abs(row.at(Measure::kGammaPrimeXs) - 1.0) <= 1e-6 &&
                   row.at(Measure::kGammaPrimeX) <= row.at(Measure::kWitnessRatio) + 1e-6);
  }
  if (e == "sparsify-bound") {
    if (!has({Measure::kSparsifyError, Measure::kSparsifyBound})) return PassState::kIndeterminate;
    return verdict(row.at(Measure::kSparsifyError) <= row.at(Measure::kSparsifyBound));
  }
  if (e == "rot-check") {
    if (thr < 0.0) return PassState::kNotApplicable;
    if (!has({Measure::kExceedances})) return PassState::kIndeterminate;
    return verdict(row.at(Measure::kExceedances) <= thr);
  }
  return PassState::kNotApplicable;
}

bool is_hard_inequality(const std::string& name) {
  return name == "rip-rno" || name == "sparsify-bound" || name == "counterexample";
}

// ---------------------------------------------------------------------------
// Trial pool
// ---------------------------------------------------------------------------

std::vector<ExperimentRow> run_trials(const ExperimentSpec& spec, const TrialFn& fn) {
  spec.validate();
  struct Job {
    std::int64_t point;
    std::int64_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < spec.grid.size(); ++p)
    for (std::int64_t t = 0; t < trials_for(spec, spec.grid[p]); ++t)
      jobs.push_back({static_cast<std::int64_t>(p), t});

  const SeedSpec root{spec.master_seed, 0};
  std::vector<std::vector<ExperimentRow>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  const auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      const GridPoint& point = spec.grid[static_cast<std::size_t>(job.point)];
      const SeedSpec seed = root.child(static_cast<std::uint64_t>(job.point))
                                .child(static_cast<std::uint64_t>(job.trial));
      try {
        const auto start = std::chrono::steady_clock::now();
        std::vector<ExperimentRow> rows = fn(point, seed);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (auto& row : rows) {
          row.experiment = spec.name;
          row.point = job.point;
          row.trial = job.trial;
          row.coords = point;
          row.wall_time = elapsed;
          row.pass = recompute_pass(row);
        }
        results[i] = std::move(rows);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, spec.workers));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, jobs.size()); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ExperimentRow> rows;
  for (auto& r : results)
    for (auto& row : r) rows.push_back(std::move(row));
  return rows;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  if (spec.name == "thm-main") return run_thm_main(spec);
  if (spec.name == "lasso-rate") return run_lasso_rate(spec);
  if (spec.name == "rno-whp") return run_rno_whp(spec);
  if (spec.name == "rip-rno") return run_rip_rno(spec);
  if (spec.name == "counterexample") return run_counterexample(spec);
  if (spec.name == "sparsify-bound") return run_sparsify_bound(spec);
  if (spec.name == "rot-check") return run_rot_check(spec);
  throw SpecError("unknown experiment '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

double median(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

std::vector<const ExperimentRow*> rows_of(const std::vector<ExperimentRow>& rows,
                                          std::int64_t point, bool control) {
  std::vector<const ExperimentRow*> out;
  for (const auto& r : rows)
    if (r.point == point && r.control == control) out.push_back(&r);
  return out;
}

double median_of(const std::vector<const ExperimentRow*>& rows, Measure m) {
  std::vector<double> v;
  for (const auto* r : rows) v.push_back(r->at(m));
  return median(std::move(v));
}

std::int64_t count_state(const std::vector<const ExperimentRow*>& rows, PassState s) {
  return std::count_if(rows.begin(), rows.end(), [&](const auto* r) { return r->pass == s; });
}

std::string point_label(std::size_t p, const GridPoint& g) {
  return "point " + std::to_string(p) + " (n=" + std::to_string(g.n) + ", d=" +
         std::to_string(g.d) + ", k=" + std::to_string(g.k) + ")";
}

}  // namespace

std::vector<SummaryCheck> summary_checks(const ExperimentSpec& spec,
                                         const std::vector<ExperimentRow>& rows) {
  std::vector<SummaryCheck> checks;
  const auto& grid = spec.grid;
  const auto all_rows_pass = [&](const std::string& label) {
    std::int64_t bad = 0;
    for (const auto& r : rows)
      if (r.pass == PassState::kFail || r.pass == PassState::kIndeterminate) ++bad;
    checks.push_back({label, static_cast<double>(bad), 0.0, bad == 0, "rows failing"});
  };

  if (spec.name == "thm-main") {
    double c_needed = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto rs = rows_of(rows, static_cast<std::int64_t>(p), false);
      const auto passes = count_state(rs, PassState::kPass);
      const auto required = static_cast<std::int64_t>(std::ceil(0.96 * static_cast<double>(rs.size())));
      checks.push_back({point_label(p, grid[p]) + ": trials with ratio >= threshold",
                        static_cast<double>(passes), static_cast<double>(required),
                        passes >= required, "48 of 50 is a chosen cut-off for high probability"});
      for (const auto* r : rs)
        if (r->get(Measure::kCFit)) c_needed = std::max(c_needed, r->at(Measure::kCFit));
    }
    checks.push_back({"smallest C keeping the RNO lower bound valid on every trial", c_needed, 0.0,
                      true, "informational"});
  } else if (spec.name == "lasso-rate") {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto rs = rows_of(rows, static_cast<std::int64_t>(p), false);
      const double pred = median_of(rs, Measure::kPredError);
      const double bound = median_of(rs, Measure::kTheoryBound);
      const double base = median_of(rs, Measure::kBaselinePredError);
      const std::string label = point_label(p, grid[p]);
      checks.push_back({label + ": median pred_error / (threshold * median theory_bound)",
                        pred / (grid[p].threshold * bound), 1.0, pred <= grid[p].threshold * bound,
                        ""});
      const double ratio = base / pred;
      checks.push_back({label + ": median baseline / semirandom pred_error", ratio, 3.0,
                        ratio >= 1.0 / 3.0 && ratio <= 3.0, "must lie in [1/3, 3]"});
    }
    for (std::size_t p = 0; p < grid.size(); ++p) {
      for (std::size_t q = 0; q < grid.size(); ++q) {
        if (grid[q].k != grid[p].k || grid[q].d != grid[p].d || grid[q].sigma != grid[p].sigma ||
            grid[q].n != 2 * grid[p].n)
          continue;
        const double a = median_of(rows_of(rows, static_cast<std::int64_t>(p), false), Measure::kPredError);
        const double b = median_of(rows_of(rows, static_cast<std::int64_t>(q), false), Measure::kPredError);
        checks.push_back({"k=" + std::to_string(grid[p].k) + ": median pred_error ratio n=" +
                              std::to_string(grid[q].n) + " vs n=" + std::to_string(grid[p].n),
                          b / a, 1.0, b <= a, "doubling n should not increase the error"});
      }
    }
  } else if (spec.name == "rno-whp") {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto rs = rows_of(rows, static_cast<std::int64_t>(p), false);
      const auto passes = count_state(rs, PassState::kPass);
      checks.push_back({point_label(p, grid[p]) + ": fraction of trials with eps <= threshold",
                        static_cast<double>(passes) / static_cast<double>(rs.size()), 1.0,
                        passes == static_cast<std::int64_t>(rs.size()), ""});
      const auto ctrl = rows_of(rows, static_cast<std::int64_t>(p), true);
      if (!ctrl.empty()) {
        const auto ok = count_state(ctrl, PassState::kPass);
        checks.push_back({point_label(p, grid[p]) + ": un-rotated controls with eps = 1",
                          static_cast<double>(ok), static_cast<double>(ctrl.size()),
                          ok == static_cast<std::int64_t>(ctrl.size()), "negative control"});
      }
    }
    for (std::size_t p = 0; p < grid.size(); ++p) {
      for (std::size_t q = 0; q < grid.size(); ++q) {
        if (grid[q].n <= grid[p].n || grid[q].d != grid[p].d || grid[q].k != grid[p].k ||
            grid[q].s != grid[p].s)
          continue;
        const double a = median_of(rows_of(rows, static_cast<std::int64_t>(p), false), Measure::kRnoEps);
        const double b = median_of(rows_of(rows, static_cast<std::int64_t>(q), false), Measure::kRnoEps);
        checks.push_back({"median eps at n=" + std::to_string(grid[q].n) + " vs n=" +
                              std::to_string(grid[p].n),
                          b - a, 0.0, b <= a, "larger n should not increase eps"});
      }
    }
  } else if (spec.name == "rip-rno" || spec.name == "counterexample") {
    all_rows_pass("every row satisfies the inequality");
  } else if (spec.name == "sparsify-bound") {
    all_rows_pass("every returned beta' meets the bound");
    std::vector<double> attempts;
    for (const auto& r : rows) attempts.push_back(r.at(Measure::kAttempts));
    const double med = median(attempts);
    checks.push_back({"median attempts", med, 2.0, med <= 2.0, ""});
  } else if (spec.name == "rot-check") {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (grid[p].threshold < 0.0) continue;
      const auto rs = rows_of(rows, static_cast<std::int64_t>(p), false);
      double worst = 0.0;
      for (const auto* r : rs) worst = std::max(worst, r->at(Measure::kExceedances));
      checks.push_back({point_label(p, grid[p]) + ", eps=" + format_double(grid[p].epsilon) +
                            ": exceedances",
                        worst, grid[p].threshold, worst <= grid[p].threshold, ""});
    }
    for (std::size_t p = 0; p < grid.size(); ++p) {
      for (std::size_t q = 0; q < grid.size(); ++q) {
        if (grid[q].n <= grid[p].n || grid[q].epsilon != grid[p].epsilon ||
            grid[q].rotation != grid[p].rotation)
          continue;
        const double a = median_of(rows_of(rows, static_cast<std::int64_t>(p), false), Measure::kRate);
        const double b = median_of(rows_of(rows, static_cast<std::int64_t>(q), false), Measure::kRate);
        checks.push_back({"eps=" + format_double(grid[p].epsilon) + ": rate at n=" +
                              std::to_string(grid[q].n) + " vs n=" + std::to_string(grid[p].n),
                          b - a, 0.0, b <= a, "larger n should not raise the exceedance rate"});
      }
    }
  }
  return checks;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::string out =
      "experiment,point,trial,control,n,d,k,s,sigma,rotation,design,group_size,rho,epsilon,"
      "c_const,threshold";
  for (const char* name : measure_names()) {
    out += ',';
    out += name;
  }
  out += ",pass\n";
  for (const auto& r : rows) {
    const GridPoint& g = r.coords;
    out += csv_text(r.experiment) + ',' + std::to_string(r.point) + ',' + std::to_string(r.trial) +
           ',' + (r.control ? "1" : "0") + ',' + std::to_string(g.n) + ',' + std::to_string(g.d) +
           ',' + std::to_string(g.k) + ',' + std::to_string(g.s) + ',' + format_double(g.sigma) +
           ',' + csv_text(g.rotation) + ',' + csv_text(g.design) + ',' +
           std::to_string(g.group_size) + ',' + format_double(g.rho) + ',' +
           format_double(g.epsilon) + ',' + format_double(g.c_const) + ',' +
           format_double(g.threshold);
    for (const auto& v : r.values) out += ',' + cell(v);
    out += ',' + to_string(r.pass) + '\n';
  }
  return out;
}

Json summary_json(const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows) {
  Json points = Json::array();
  for (std::size_t p = 0; p < spec.grid.size(); ++p) {
    for (bool control : {false, true}) {
      const auto rs = rows_of(rows, static_cast<std::int64_t>(p), control);
      if (rs.empty()) continue;
      Json medians = Json::object();
      for (std::size_t m = 0; m < kMeasureCount; ++m) {
        const double v = median_of(rs, static_cast<Measure>(m));
        if (!std::isnan(v)) medians[measure_names()[m]] = v;
      }
      const auto pass = count_state(rs, PassState::kPass);
      const auto fail = count_state(rs, PassState::kFail);
      const auto indet = count_state(rs, PassState::kIndeterminate);
      const auto decided = pass + fail + indet;
      Json entry{{"point", p},
                 {"control", control},
                 {"coords", to_json(spec.grid[p])},
                 {"rows", rs.size()},
                 {"pass", pass},
                 {"fail", fail},
                 {"indeterminate", indet}};
      entry["pass_rate"] = decided > 0 ? Json(static_cast<double>(pass) / static_cast<double>(decided))
                                       : Json(nullptr);
      entry["medians"] = medians;
      points.push_back(entry);
    }
  }
  Json checks = Json::array();
  bool all_ok = true;
  for (const auto& c : summary_checks(spec, rows)) {
    all_ok = all_ok && c.pass;
    Json entry{{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}};
    if (!c.note.empty()) entry["note"] = c.note;
    checks.push_back(entry);
  }
  return Json{{"experiment", spec.name},
              {"version", kVersion},
              {"master_seed", spec.master_seed},
              {"hard_inequality", is_hard_inequality(spec.name)},
              {"all_checks_pass", all_ok},
              {"spec", to_json(spec)},
              {"points", points},
              {"checks", checks}};
}

EmittedFiles emit_results(const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows,
                          const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  EmittedFiles files;
  files.csv = (dir / (spec.name + ".csv")).string();
  files.summary = (dir / (spec.name + ".summary.json")).string();
  files.timing = (dir / (spec.name + ".timing.csv")).string();
  write_text_file(files.csv, rows_to_csv(rows));
  write_text_file(files.summary, summary_json(spec, rows).dump(2) + "\n");
  std::string timing = "point,trial,control,wall_time_s\n";
  for (const auto& r : rows)
    timing += std::to_string(r.point) + ',' + std::to_string(r.trial) + ',' +
              (r.control ? "1" : "0") + ',' + format_double(r.wall_time) + '\n';
  write_text_file(files.timing, timing);
  return files;
}

}  // namespace rotlasso
