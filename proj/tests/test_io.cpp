#include "rotlasso/designs.hpp"
#include "rotlasso/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace rotlasso;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rotlasso_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  RandomStream r(SeedSpec{90, 0});
  for (int i = 0; i < 1000; ++i) {
    const double v = r.normal() * std::pow(10.0, static_cast<double>(r.uniform_index(40)) - 20.0);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(DesignFiles, CsvRoundTripIsBitExact) {
  const std::string dir = temp_dir("roundtrip");
  const DesignMatrix x = gaussian_design(17, 5, SeedSpec{91, 0});
  const std::string path = dir + "/x.csv";
  write_design(path, x, SeedSpec{91, 0});
  EXPECT_EQ(sidecar_path(path), dir + "/x.json");
  const DesignMatrix y = read_design(path);
  EXPECT_EQ(y.entries(), x.entries());
  EXPECT_TRUE(y.normalized());
  const Json side = parse_json(read_text_file(sidecar_path(path)));
  EXPECT_EQ(side["n"], 17);
  EXPECT_EQ(side["seed"]["master_seed"], 91);
}

TEST(DesignFiles, SidecarMismatchIsRejected) {
  const std::string dir = temp_dir("mismatch");
  const std::string path = dir + "/x.csv";
  write_design(path, gaussian_design(6, 3, SeedSpec{92, 0}));
  write_text_file(sidecar_path(path), R"({"n": 6, "d": 4, "normalized": true, "seed": null})");
  EXPECT_THROW(read_design(path), ParseError);
}

TEST(DesignFiles, MissingSidecarInfersNormalization) {
  const std::string dir = temp_dir("nosidecar");
  const std::string path = dir + "/x.csv";
  write_text_file(path, "1,2\n3,4\n");
  const DesignMatrix x = read_design(path);
  EXPECT_FALSE(x.normalized());
  EXPECT_EQ(x.entries()(1, 0), 3.0);
}

TEST(MatrixCsv, RejectsBadInput) {
  EXPECT_THROW(parse_matrix_csv("1,2\n3\n"), ParseError);
  EXPECT_THROW(parse_matrix_csv("1,x\n"), ParseError);
  EXPECT_THROW(parse_matrix_csv(""), ParseError);
  const Matrix m = parse_matrix_csv("1.5, -2\n3e2,4\n");
  EXPECT_EQ(m(0, 1), -2.0);
  EXPECT_EQ(m(1, 0), 300.0);
  EXPECT_EQ(parse_matrix_csv(matrix_to_csv(m)), m);
}

TEST(JsonConversions, SupportAndSparseVector) {
  const SupportSet s(6, {1, 4});
  EXPECT_EQ(support_from_json(to_json(s)), s);
  EXPECT_EQ(support_from_json(Json::parse("[4, 1]"), 6), s);
  EXPECT_THROW(support_from_json(Json::parse("[1]")), ParseError);
  const SparseVector v(5, {{0, 0.25}, {3, -1.0}});
  EXPECT_EQ(sparse_vector_from_json(to_json(v)), v);
  EXPECT_EQ(sparse_vector_from_json(Json::parse("[0.25, 0, 0, -1, 0]")), v);
  Vector d(2);
  d << 1.0, 2.0;
  EXPECT_EQ(dense_vector_from_json(to_json(d)), d);
  EXPECT_THROW(parse_json("{"), ParseError);
}

TEST(JsonConversions, CertificateFields) {
  Certificate c;
  c.kind = CertificateKind::kRno;
  c.value = 0.25;
  c.method = CertificateMethod::kEnumeration;
  c.witness = SupportPair{SupportSet(4, {0}), SupportSet(4, {3})};
  const Json j = to_json(c);
  EXPECT_EQ(j["value"], 0.25);
  EXPECT_EQ(j["method"], to_string(CertificateMethod::kEnumeration));
  EXPECT_TRUE(j.contains("solver_report"));
  EXPECT_TRUE(j["solver_report"].contains("converged"));
}
