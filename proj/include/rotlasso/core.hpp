#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rotlasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSupportError : public Error {
 public:
  using Error::Error;
};

class DegenerateColumnError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Tolerances shared across modules
// ---------------------------------------------------------------------------

/// Relative tolerance on column norms for the sqrt(n) normalization.
inline constexpr double kColumnNormTol = 1e-9;
/// Relative singular-value cutoff used when extracting orthonormal bases.
inline constexpr double kRankTol = 1e-10;

// ---------------------------------------------------------------------------
// SeedSpec
// ---------------------------------------------------------------------------

/// Identifies one deterministic random stream. Distinct (master_seed,
/// stream_id) pairs address distinct generator states.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Derives a sub-stream for a labelled consumer (trial index, restart, ...).
  [[nodiscard]] SeedSpec child(std::uint64_t tag) const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based generator (Philox4x32-10). The key is the master seed, the
/// upper half of the counter is the stream id, the lower half counts blocks.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(const SeedSpec& spec);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform double in the open interval (0, 1).
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// +1 or -1 with equal probability.
  double rademacher();
  /// Uniform integer in [0, bound).
  Index uniform_index(Index bound);

  Vector normal_vector(Index n);
  Matrix normal_matrix(Index rows, Index cols);
  /// Uniform point on the unit sphere in R^n.
  Vector unit_sphere(Index n);

  [[nodiscard]] const SeedSpec& spec() const { return spec_; }

 private:
  void refill();

  SeedSpec spec_;
  std::uint64_t block_ = 0;
  std::uint64_t buffer_[2] = {0, 0};
  int buffered_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Raw Philox4x32-10 block function, exposed for known-answer tests.
void philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key[2],
                   std::uint32_t out[4]);

RandomStream seeded_stream(const SeedSpec& spec);

// ---------------------------------------------------------------------------
// SupportSet
// ---------------------------------------------------------------------------

class SupportSet {
 public:
  SupportSet() = default;
  /// Indices must be strictly increasing and lie in [0, dim).
  SupportSet(Index dim, std::vector<Index> indices);

  /// Sorts and de-duplicates before validating.
  static SupportSet from_unsorted(Index dim, std::vector<Index> indices);
  static SupportSet all(Index dim);
  static SupportSet empty_of(Index dim);
  /// The half-open range [begin, end).
  static SupportSet range(Index dim, Index begin, Index end);

  [[nodiscard]] Index dim() const { return dim_; }
  [[nodiscard]] Index size() const { return static_cast<Index>(indices_.size()); }
  [[nodiscard]] bool empty() const { return indices_.empty(); }
  [[nodiscard]] const std::vector<Index>& indices() const { return indices_; }
  [[nodiscard]] Index operator[](Index i) const { return indices_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] bool contains(Index j) const;
  [[nodiscard]] SupportSet complement() const;
  /// True when every index of this set lies in `other` (same dim).
  [[nodiscard]] bool subset_of(const SupportSet& other) const;
  /// Maps each index to its position within `parent`; requires subset_of(parent).
  [[nodiscard]] SupportSet relative_to(const SupportSet& parent) const;
  /// Inverse of relative_to: interprets this set's indices as positions in `parent`.
  [[nodiscard]] SupportSet lift_into(const SupportSet& parent) const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  Index dim_ = 0;
  std::vector<Index> indices_;
};

// ---------------------------------------------------------------------------
// SparseVector
// ---------------------------------------------------------------------------

class SparseVector {
 public:
  using Term = std::pair<Index, double>;

  SparseVector() = default;
  /// Terms must have strictly increasing in-range indices; zero values are dropped.
  SparseVector(Index dim, std::vector<Term> terms);

  static SparseVector from_dense(const Vector& dense);
  static SparseVector zero(Index dim) { return SparseVector(dim, {}); }

  [[nodiscard]] Index dim() const { return dim_; }
  [[nodiscard]] Index nnz() const { return static_cast<Index>(terms_.size()); }
  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }

  [[nodiscard]] Vector to_dense() const;
  [[nodiscard]] SupportSet support() const;
  [[nodiscard]] double l1_norm() const;
  [[nodiscard]] double l2_norm() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  Index dim_ = 0;
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// DesignMatrix
// ---------------------------------------------------------------------------

/// Dense n x d design. When `normalized` is set every column has Euclidean
/// norm sqrt(n) up to kColumnNormTol relative error; construction checks it.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  explicit DesignMatrix(Matrix entries, bool normalized = false);

  [[nodiscard]] Index rows() const { return entries_.rows(); }
  [[nodiscard]] Index cols() const { return entries_.cols(); }
  [[nodiscard]] const Matrix& entries() const { return entries_; }
  [[nodiscard]] bool normalized() const { return normalized_; }
  [[nodiscard]] auto col(Index j) const { return entries_.col(j); }

  /// (1/n) X^T X.
  [[nodiscard]] Matrix scaled_gram() const;

 private:
  Matrix entries_;
  bool normalized_ = false;
};

/// True when every column has norm sqrt(n) within kColumnNormTol * sqrt(n).
bool columns_have_norm_sqrt_n(const Matrix& m);

DesignMatrix restrict_columns(const DesignMatrix& x, const SupportSet& s);
DesignMatrix normalize_columns(const DesignMatrix& x);
/// Orthonormal basis of col(m); rank decided by sigma_i > kRankTol * sigma_max.
Matrix orthonormal_basis(const Matrix& m);

/// X / sqrt(n): the unit-column scaling used by the RIP certificate.
DesignMatrix unit_column_scaling(const DesignMatrix& x);

// ---------------------------------------------------------------------------
// Combinatorics
// ---------------------------------------------------------------------------

/// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Visits every r-subset of {0..m-1} in lexicographic order.
template <typename Fn>
void for_each_combination(Index m, Index r, Fn&& fn) {
  if (r < 0 || r > m) return;
  std::vector<Index> idx(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(static_cast<const std::vector<Index>&>(idx));
    Index i = r - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - r + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < r; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// Uniformly random k-subset of [0, d), returned sorted.
SupportSet random_support(Index d, Index k, RandomStream& rng);

}  // namespace rotlasso
