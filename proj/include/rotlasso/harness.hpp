#pragma once

#include "rotlasso/core.hpp"
#include "rotlasso/io.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rotlasso {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"thm-main",       "lasso-rate",    "rno-whp",
                                              "rip-rno",        "counterexample", "sparsify-bound",
                                              "rot-check"};
  return names;
}

/// One point of an experiment grid. Fields an experiment does not use are ignored.
struct GridPoint {
  Index n = 100;
  Index d = 20;
  Index k = 2;
  Index s = 2;
  double sigma = 1.0;
  std::string rotation = "haar";
  /// Column structure: "duplicated", "grouped", "gaussian", "orthonormal", "dup-pair".
  std::string design = "duplicated";
  Index group_size = 4;
  double rho = 0.0;
  double epsilon = 0.5;
  double c_const = 4.0;
  /// Overrides ExperimentSpec::trials when positive.
  std::int64_t trials = 0;
  /// Regenerations per trial (rot-check).
  std::int64_t inner_trials = 0;
  /// Largest |S| enumerated (rip-rno).
  Index max_support = 4;
  /// Pass threshold; its meaning depends on the experiment.
  double threshold = 0.0;
  /// Adds an un-rotated negative-control row per trial (rno-whp).
  bool control = false;
};

struct ExperimentSpec {
  std::string name;
  std::vector<GridPoint> grid;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;

  void validate() const;
};

/// The acceptance-scale configuration for each experiment.
ExperimentSpec default_spec(const std::string& name);

ExperimentSpec spec_from_json(const Json& j, const std::string& name_hint = "");
Json to_json(const ExperimentSpec& spec);
Json to_json(const GridPoint& p);

enum class PassState { kPass, kFail, kIndeterminate, kNotApplicable };
std::string to_string(PassState p);

/// Measured columns, in CSV order. New columns are only ever appended.
enum class Measure : int {
  kGammaX,
  kGammaXs,
  kRatio,
  kConverged,
  kRnoEps,
  kRipDelta,
  kRnoBound,
  kReLowerC2,
  kReLowerC4,
  kReLowerC8,
  kCFit,
  kPredError,
  kTheoryBound,
  kBaselinePredError,
  kBaselineTheoryBound,
  kL1Error,
  kL2Restricted,
  kLassoIterations,
  kGammaPrimeX,
  kGammaPrimeXs,
  kWitnessRatio,
  kSparsifyError,
  kSparsifyBound,
  kAttempts,
  kExceedances,
  kInnerTrials,
  kRate,
  kSupportsChecked,
  kCount,
};

inline constexpr std::size_t kMeasureCount = static_cast<std::size_t>(Measure::kCount);
const std::array<const char*, kMeasureCount>& measure_names();

struct ExperimentRow {
  std::string experiment;
  std::int64_t point = 0;
  std::int64_t trial = 0;
  GridPoint coords;
  bool control = false;
  std::array<std::optional<double>, kMeasureCount> values{};
  PassState pass = PassState::kNotApplicable;
  /// Seconds; written to the timing file only, never to the CSV.
  double wall_time = 0.0;

  void set(Measure m, double v) { values[static_cast<std::size_t>(m)] = v; }
  [[nodiscard]] std::optional<double> get(Measure m) const {
    return values[static_cast<std::size_t>(m)];
  }
  [[nodiscard]] double at(Measure m) const;
};

/// The pass flag as a function of the row's recorded values and thresholds.
PassState recompute_pass(const ExperimentRow& row);

std::vector<ExperimentRow> run_thm_main(const ExperimentSpec& spec);
std::vector<ExperimentRow> run_lasso_rate(const ExperimentSpec& spec);
std::vector<ExperimentRow> run_rno_whp(const ExperimentSpec& spec);
std::vector<ExperimentRow> run_rip_rno(const ExperimentSpec& spec);
std::vector<ExperimentRow> run_counterexample(const ExperimentSpec& spec);
std::vector<ExperimentRow> run_sparsify_bound(const ExperimentSpec& spec);
std::vector<ExperimentRow> run_rot_check(const ExperimentSpec& spec);

/// Dispatches on spec.name.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

/// Named aggregate check reported in the summary.
struct SummaryCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<SummaryCheck> summary_checks(const ExperimentSpec& spec,
                                         const std::vector<ExperimentRow>& rows);

/// True for experiments whose rows check a deterministic inequality.
bool is_hard_inequality(const std::string& name);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
Json summary_json(const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows);

struct EmittedFiles {
  std::string csv;
  std::string summary;
  std::string timing;
};

/// Writes <name>.csv, <name>.summary.json and <name>.timing.csv into out_dir.
EmittedFiles emit_results(const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows,
                          const std::string& out_dir);

double median(std::vector<double> values);

}  // namespace rotlasso
