#include "rotlasso/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace rotlasso;

namespace {

ExperimentSpec small(const std::string& name, const std::string& json) {
  return spec_from_json(Json::parse(json), name);
}

}  // namespace

TEST(Spec, DefaultsValidate) {
  for (const auto& name : experiment_names()) {
    const ExperimentSpec spec = default_spec(name);
    EXPECT_NO_THROW(spec.validate()) << name;
    EXPECT_EQ(spec.name, name);
    const ExperimentSpec back = spec_from_json(to_json(spec));
    EXPECT_EQ(to_json(back).dump(), to_json(spec).dump()) << name;
  }
}

TEST(Spec, RejectsMalformedConfigs) {
  EXPECT_THROW(spec_from_json(Json::parse(R"({"name": "nope"})")), SpecError);
  EXPECT_THROW(small("thm-main", R"({"bogus": 1})"), SpecError);
  EXPECT_THROW(small("thm-main", R"({"grid": [{"n": 10, "colour": 2}]})"), SpecError);
  EXPECT_THROW(small("thm-main", R"({"trials": 0})"), SpecError);
  EXPECT_THROW(small("thm-main", R"({"grid": [{"k": 30, "d": 20}]})"), SpecError);
  EXPECT_THROW(small("thm-main", R"({"grid": [{"rotation": "sideways"}]})"), ParseError);
  EXPECT_THROW(small("rot-check", R"({"grid": [{"d": 4, "k": 3, "inner_trials": 5}]})"), SpecError);
  EXPECT_THROW(small("counterexample", R"({"grid": [{"k": 4, "d": 5}]})"), SpecError);
  EXPECT_THROW(small("rip-rno", R"({"grid": [{"d": 6, "max_support": 6}]})"), SpecError);
  EXPECT_THROW(small("thm-main", R"({"grid": [{"design": "orthonormal", "n": 10, "d": 20}]})"), SpecError);
  EXPECT_THROW(small("lasso-rate", R"({"name": "rno-whp"})"), SpecError);
  EXPECT_THROW(small("thm-main", R"({"grid": {"n": 3}})"), SpecError);
}

TEST(Harness, DeterministicAndWorkerInvariant) {
  const ExperimentSpec base =
      small("thm-main", R"({"trials": 4, "master_seed": 7, "grid": [{"n": 40, "d": 12, "k": 2, "s": 2}]})");
  ExperimentSpec par = base;
  par.workers = 3;
  const auto a = run_experiment(base);
  const auto b = run_experiment(base);
  const auto c = run_experiment(par);
  EXPECT_EQ(rows_to_csv(a), rows_to_csv(b));
  EXPECT_EQ(rows_to_csv(a), rows_to_csv(c));
  EXPECT_EQ(summary_json(base, a).dump(), summary_json(base, c).dump());
  ExperimentSpec other = base;
  other.master_seed = 8;
  EXPECT_NE(rows_to_csv(a), rows_to_csv(run_experiment(other)));
}

TEST(Harness, StoredPassMatchesRecomputation) {
  const std::vector<std::pair<std::string, std::string>> specs{
      {"thm-main", R"({"trials": 3, "grid": [{"n": 30, "d": 10, "k": 2}]})"},
      {"lasso-rate", R"({"trials": 3, "grid": [{"n": 40, "d": 16, "k": 2}]})"},
      {"rno-whp", R"({"trials": 3, "grid": [{"n": 40, "d": 8, "k": 2, "control": true}]})"},
      {"rip-rno", R"({"trials": 3, "grid": [{"n": 30, "d": 6, "s": 2, "design": "gaussian", "max_support": 2}]})"},
      {"counterexample", R"({"grid": [{"n": 30, "k": 4, "d": 8}]})"},
      {"sparsify-bound", R"({"trials": 5, "grid": [{"n": 10, "d": 20, "s": 4}]})"},
      {"rot-check", R"({"grid": [{"n": 50, "d": 4, "k": 2, "inner_trials": 30, "threshold": 30}]})"},
  };
  for (const auto& [name, json] : specs) {
    const ExperimentSpec spec = small(name, json);
    const auto rows = run_experiment(spec);
    ASSERT_FALSE(rows.empty()) << name;
    for (const auto& row : rows) {
      EXPECT_EQ(row.experiment, name);
      EXPECT_EQ(row.pass, recompute_pass(row)) << name << " trial " << row.trial;
    }
    EXPECT_FALSE(summary_checks(spec, rows).empty()) << name;
  }
}

TEST(Harness, OrthonormalThmMainRatioIsOne) {
  const auto rows = run_experiment(
      small("thm-main", R"({"trials": 1, "grid": [{"n": 16, "d": 16, "k": 3, "design": "orthonormal"}]})"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].at(Measure::kRatio), 1.0, 1e-6);
}

TEST(Harness, TinyThmMainDoesNotCrash) {
  EXPECT_NO_THROW(run_experiment(small("thm-main", R"({"trials": 2, "grid": [{"n": 3, "d": 4, "k": 1, "s": 1}]})")));
}

TEST(Harness, NoiselessLassoRateIsExact) {
  const auto rows = run_experiment(
      small("lasso-rate", R"({"trials": 2, "grid": [{"n": 60, "d": 20, "k": 2, "sigma": 0, "threshold": 30}]})"));
  for (const auto& row : rows) {
    EXPECT_LE(row.at(Measure::kPredError), 1e-8);
    EXPECT_EQ(row.pass, PassState::kPass);
  }
}

TEST(Harness, RotCheckEpsilonOneHasNoExceedances) {
  const auto rows = run_experiment(small(
      "rot-check", R"({"grid": [{"n": 40, "d": 4, "k": 2, "epsilon": 1.0, "inner_trials": 50, "threshold": 0}]})"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].at(Measure::kExceedances), 0.0);
  EXPECT_EQ(rows[0].pass, PassState::kPass);
}

TEST(Harness, EmitWritesSeparateTimingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "rotlasso_test_emit";
  std::filesystem::remove_all(dir);
  const ExperimentSpec spec = small("sparsify-bound", R"({"trials": 3, "grid": [{"n": 10, "d": 20, "s": 4}]})");
  const auto rows = run_experiment(spec);
  const EmittedFiles files = emit_results(spec, rows, dir.string());
  EXPECT_TRUE(std::filesystem::exists(files.csv));
  EXPECT_TRUE(std::filesystem::exists(files.summary));
  EXPECT_TRUE(std::filesystem::exists(files.timing));
  const std::string csv = read_text_file(files.csv);
  EXPECT_EQ(csv.find("wall"), std::string::npos);
  EXPECT_NE(read_text_file(files.timing).find("wall"), std::string::npos);
  const Json summary = parse_json(read_text_file(files.summary));
  EXPECT_EQ(summary["experiment"], "sparsify-bound");
  EXPECT_TRUE(summary.contains("checks"));
}

TEST(Harness, MedianHelper) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0}), 2.5);
}
