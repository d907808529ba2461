#include "rotlasso/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rotlasso {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!out) throw ParseError("write failed for " + path);
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string field = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                        : comma - start);
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      if (b == std::string::npos) throw ParseError("empty field on CSV line " + std::to_string(line_no));
      field = field.substr(b, e - b + 1);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw ParseError("bad number '" + field + "' on CSV line " + std::to_string(line_no));
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("ragged CSV: line " + std::to_string(line_no) + " has " +
                       std::to_string(row.size()) + " fields");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("CSV holds no rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

Json to_json(const SeedSpec& seed) {
  return Json{{"master_seed", seed.master_seed}, {"stream_id", seed.stream_id}};
}

void write_design(const std::string& csv_path, const DesignMatrix& x,
                  const std::optional<SeedSpec>& seed) {
  write_text_file(csv_path, matrix_to_csv(x.entries()));
  Json side{{"n", x.rows()}, {"d", x.cols()}, {"normalized", x.normalized()}};
  side["seed"] = seed ? to_json(*seed) : Json(nullptr);
  write_text_file(sidecar_path(csv_path), side.dump(2) + "\n");
}

DesignMatrix read_design(const std::string& csv_path) {
  Matrix m = parse_matrix_csv(read_text_file(csv_path));
  bool normalized = false;
  const std::string side = sidecar_path(csv_path);
  if (std::filesystem::exists(side)) {
    const Json j = parse_json(read_text_file(side));
    if (j.contains("n") && j["n"].get<Index>() != m.rows())
      throw ParseError("sidecar n does not match the CSV row count");
    if (j.contains("d") && j["d"].get<Index>() != m.cols())
      throw ParseError("sidecar d does not match the CSV column count");
    normalized = j.value("normalized", false);
  } else {
    normalized = columns_have_norm_sqrt_n(m);
  }
  return DesignMatrix(std::move(m), normalized);
}

Json to_json(const SupportSet& s) {
  Json idx = Json::array();
  for (Index i : s.indices()) idx.push_back(i);
  return Json{{"dim", s.dim()}, {"indices", idx}};
}

Json to_json(const SparseVector& v) {
  Json terms = Json::array();
  for (const auto& [i, x] : v.terms()) terms.push_back(Json::array({i, x}));
  return Json{{"dim", v.dim()}, {"terms", terms}};
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Certificate& cert) {
  Json witness;
  if (const auto* z = std::get_if<SparseVector>(&cert.witness)) {
    witness = to_json(*z);
  } else if (const auto* pair = std::get_if<SupportPair>(&cert.witness)) {
    witness = Json{{"alpha", to_json(pair->alpha)}, {"beta", to_json(pair->beta)}};
  } else {
    witness = to_json(std::get<SupportSet>(cert.witness));
  }
  Json report{{"iterations", cert.report.iterations},
              {"restarts", cert.report.restarts},
              {"residual", cert.report.residual},
              {"converged", cert.report.converged},
              {"spread", cert.report.spread}};
  Json out{{"kind", to_string(cert.kind)},
           {"value", cert.value},
           {"witness", witness},
           {"method", to_string(cert.method)},
           {"solver_report", report}};
  if (!cert.note.empty()) out["note"] = cert.note;
  return out;
}

Json to_json(const SparsifyResult& r) {
  return Json{{"beta_prime", to_json(r.beta_prime)},
              {"error", r.error},
              {"bound", r.bound},
              {"attempts", r.attempts}};
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

SupportSet support_from_json(const Json& j, std::optional<Index> dim) {
  try {
    if (j.is_object()) {
      const Index d = j.at("dim").get<Index>();
      if (dim && *dim != d) throw InvalidSupportError("support dimension does not match the design");
      return SupportSet::from_unsorted(d, j.at("indices").get<std::vector<Index>>());
    }
    if (j.is_array()) {
      if (!dim) throw ParseError("a bare index array needs the design dimension");
      return SupportSet::from_unsorted(*dim, j.get<std::vector<Index>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed support JSON: ") + e.what());
  }
  throw ParseError("support JSON must be an object or an array");
}

Vector dense_vector_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a JSON array of numbers");
  Vector v(static_cast<Index>(j.size()));
  try {
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed vector JSON: ") + e.what());
  }
  return v;
}

SparseVector sparse_vector_from_json(const Json& j) {
  if (j.is_array()) return SparseVector::from_dense(dense_vector_from_json(j));
  try {
    const Index d = j.at("dim").get<Index>();
    std::vector<SparseVector::Term> terms;
    for (const auto& t : j.at("terms")) terms.emplace_back(t.at(0).get<Index>(), t.at(1).get<double>());
    std::sort(terms.begin(), terms.end());
    return SparseVector(d, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed sparse vector JSON: ") + e.what());
  }
}

}  // namespace rotlasso
