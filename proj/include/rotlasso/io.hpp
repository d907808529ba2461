#pragma once

#include "rotlasso/certificates.hpp"
#include "rotlasso/core.hpp"
#include "rotlasso/sparsify.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace rotlasso {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

/// "<stem>.json" next to "<stem>.csv".
std::string sidecar_path(const std::string& csv_path);

/// Writes the CSV (no header) and its JSON sidecar {"n","d","normalized","seed"}.
void write_design(const std::string& csv_path, const DesignMatrix& x,
                  const std::optional<SeedSpec>& seed = std::nullopt);

/// Reads the CSV and, when present, the sidecar; sidecar sizes must match the CSV.
DesignMatrix read_design(const std::string& csv_path);

Matrix parse_matrix_csv(const std::string& text);
std::string matrix_to_csv(const Matrix& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Json to_json(const SeedSpec& seed);
Json to_json(const SupportSet& s);
Json to_json(const SparseVector& v);
Json to_json(const Certificate& cert);
Json to_json(const SparsifyResult& r);
Json to_json(const Vector& v);

/// Accepts {"dim": d, "indices": [...]} or a bare index array (then `dim` is required).
SupportSet support_from_json(const Json& j, std::optional<Index> dim = std::nullopt);
/// Accepts {"dim": d, "terms": [[i, v], ...]} or a dense array.
SparseVector sparse_vector_from_json(const Json& j);
Vector dense_vector_from_json(const Json& j);

Json parse_json(const std::string& text);

}  // namespace rotlasso
