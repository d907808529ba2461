#include "rotlasso/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rotlasso {

// ---------------------------------------------------------------------------
// SupportSet
// ---------------------------------------------------------------------------

SupportSet::SupportSet(Index dim, std::vector<Index> indices)
    : dim_(dim), indices_(std::move(indices)) {
  if (dim_ < 0) throw InvalidSupportError("support dimension must be non-negative");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const Index j = indices_[i];
    if (j < 0 || j >= dim_)
      throw InvalidSupportError("support index " + std::to_string(j) +
                                " out of range [0, " + std::to_string(dim_) + ")");
    if (i > 0 && indices_[i - 1] >= j)
      throw InvalidSupportError("support indices must be strictly increasing");
  }
}

SupportSet SupportSet::from_unsorted(Index dim, std::vector<Index> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return SupportSet(dim, std::move(indices));
}

SupportSet SupportSet::all(Index dim) { return range(dim, 0, dim); }

SupportSet SupportSet::empty_of(Index dim) { return SupportSet(dim, {}); }

SupportSet SupportSet::range(Index dim, Index begin, Index end) {
  std::vector<Index> idx;
  for (Index j = begin; j < end; ++j) idx.push_back(j);
  return SupportSet(dim, std::move(idx));
}

bool SupportSet::contains(Index j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

SupportSet SupportSet::complement() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(dim_ - size()));
  std::size_t p = 0;
  for (Index j = 0; j < dim_; ++j) {
    if (p < indices_.size() && indices_[p] == j) {
      ++p;
      continue;
    }
    out.push_back(j);
  }
  return SupportSet(dim_, std::move(out));
}

bool SupportSet::subset_of(const SupportSet& other) const {
  if (dim_ != other.dim_) return false;
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

SupportSet SupportSet::relative_to(const SupportSet& parent) const {
  if (!subset_of(parent)) throw InvalidSupportError("support is not a subset of its parent");
  std::vector<Index> rel;
  rel.reserve(indices_.size());
  for (Index j : indices_) {
    const auto it = std::lower_bound(parent.indices_.begin(), parent.indices_.end(), j);
    rel.push_back(static_cast<Index>(it - parent.indices_.begin()));
  }
  return SupportSet(parent.size(), std::move(rel));
}

SupportSet SupportSet::lift_into(const SupportSet& parent) const {
  if (dim_ != parent.size())
    throw InvalidSupportError("relative support dimension does not match parent size");
  std::vector<Index> abs;
  abs.reserve(indices_.size());
  for (Index j : indices_) abs.push_back(parent[j]);
  return SupportSet(parent.dim(), std::move(abs));
}

// ---------------------------------------------------------------------------
// SparseVector
// ---------------------------------------------------------------------------

SparseVector::SparseVector(Index dim, std::vector<Term> terms) : dim_(dim) {
  if (dim_ < 0) throw DomainError("sparse vector dimension must be non-negative");
  terms_.reserve(terms.size());
  Index prev = -1;
  for (const auto& [j, v] : terms) {
    if (j < 0 || j >= dim_)
      throw InvalidSupportError("sparse vector index " + std::to_string(j) + " out of range");
    if (j <= prev) throw InvalidSupportError("sparse vector indices must be strictly increasing");
    if (!std::isfinite(v)) throw DomainError("sparse vector values must be finite");
    prev = j;
    if (v != 0.0) terms_.emplace_back(j, v);
  }
}

SparseVector SparseVector::from_dense(const Vector& dense) {
  std::vector<Term> terms;
  for (Index j = 0; j < dense.size(); ++j)
    if (dense(j) != 0.0) terms.emplace_back(j, dense(j));
  return SparseVector(dense.size(), std::move(terms));
}

Vector SparseVector::to_dense() const {
  Vector v = Vector::Zero(dim_);
  for (const auto& [j, x] : terms_) v(j) = x;
  return v;
}

SupportSet SparseVector::support() const {
  std::vector<Index> idx;
  idx.reserve(terms_.size());
  for (const auto& t : terms_) idx.push_back(t.first);
  return SupportSet(dim_, std::move(idx));
}

double SparseVector::l1_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.second);
  return s;
}

double SparseVector::l2_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.second * t.second;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// DesignMatrix
// ---------------------------------------------------------------------------

bool columns_have_norm_sqrt_n(const Matrix& m) {
  const double target = std::sqrt(static_cast<double>(m.rows()));
  for (Index j = 0; j < m.cols(); ++j)
    if (std::abs(m.col(j).norm() - target) > kColumnNormTol * target) return false;
  return true;
}

DesignMatrix::DesignMatrix(Matrix entries, bool normalized)
    : entries_(std::move(entries)), normalized_(normalized) {
  if (entries_.rows() < 1) throw SizeError("design matrix needs at least one row");
  if (!entries_.allFinite()) throw DomainError("design matrix entries must be finite");
  if (normalized_ && !columns_have_norm_sqrt_n(entries_))
    throw DomainError("design matrix flagged normalized but a column norm differs from sqrt(n)");
}

Matrix DesignMatrix::scaled_gram() const {
  Matrix g(cols(), cols());
  g.setZero();
  g.selfadjointView<Eigen::Lower>().rankUpdate(entries_.transpose(),
                                              1.0 / static_cast<double>(rows()));
  return g.selfadjointView<Eigen::Lower>();
}

DesignMatrix restrict_columns(const DesignMatrix& x, const SupportSet& s) {
  if (s.dim() != x.cols())
    throw InvalidSupportError("support dimension " + std::to_string(s.dim()) +
                              " does not match design width " + std::to_string(x.cols()));
  Matrix out(x.rows(), s.size());
  for (Index j = 0; j < s.size(); ++j) out.col(j) = x.col(s[j]);
  return DesignMatrix(std::move(out), x.normalized());
}

DesignMatrix normalize_columns(const DesignMatrix& x) {
  const double target = std::sqrt(static_cast<double>(x.rows()));
  Matrix out = x.entries();
  for (Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm == 0.0)
      throw DegenerateColumnError("column " + std::to_string(j) + " is the zero vector");
    // Leave columns already at the target length untouched so the operation
    // is idempotent to the last bit.
    if (std::abs(norm - target) > 1e-15 * target) out.col(j) *= target / norm;
  }
  return DesignMatrix(std::move(out), true);
}

Matrix orthonormal_basis(const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) throw SizeError("orthonormal_basis needs a non-empty matrix");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return Matrix(m.rows(), 0);
  Index r = 0;
  while (r < sv.size() && sv(r) > kRankTol * smax) ++r;
  return svd.matrixU().leftCols(r);
}

DesignMatrix unit_column_scaling(const DesignMatrix& x) {
  return DesignMatrix(x.entries() / std::sqrt(static_cast<double>(x.rows())), false);
}

// ---------------------------------------------------------------------------
// Combinatorics
// ---------------------------------------------------------------------------

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(r);
}

SupportSet random_support(Index d, Index k, RandomStream& rng) {
  if (k < 0 || k > d) throw SizeError("random_support: need 0 <= k <= d");
  // Partial Fisher-Yates.
  std::vector<Index> pool(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < k; ++i) {
    const Index j = i + rng.uniform_index(d - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return SupportSet::from_unsorted(d, std::move(pool));
}

}  // namespace rotlasso
