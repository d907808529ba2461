#include "rotlasso/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace rotlasso {

namespace {

SparseVector draw(const SparseVector& beta, double l1, Index s, RandomStream& rng) {
  const auto& terms = beta.terms();
  std::vector<double> cdf(terms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc += std::abs(terms[i].second);
    cdf[i] = acc;
  }
  std::map<Index, double> mass;
  const double unit = l1 / static_cast<double>(s);
  for (Index draw_index = 0; draw_index < s; ++draw_index) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto& [j, v] = terms[static_cast<std::size_t>(it - cdf.begin())];
    mass[j] += v < 0.0 ? -unit : unit;
  }
  std::vector<SparseVector::Term> out(mass.begin(), mass.end());
  return SparseVector(beta.dim(), std::move(out));
}

}  // namespace

double sparsification_error(const DesignMatrix& x, const SparseVector& beta,
                            const SparseVector& beta_prime) {
  if (beta.dim() != x.cols() || beta_prime.dim() != x.cols())
    throw SizeError("coefficient dimension does not match the design");
  Vector r = Vector::Zero(x.rows());
  for (const auto& [j, v] : beta.terms()) r += v * x.col(j);
  for (const auto& [j, v] : beta_prime.terms()) r -= v * x.col(j);
  return r.norm();
}

double sparsification_error(const DesignMatrix& x, const Vector& beta, const Vector& beta_prime) {
  return sparsification_error(x, SparseVector::from_dense(beta),
                              SparseVector::from_dense(beta_prime));
}

SparsifyResult maurey_sparsify(const DesignMatrix& x, const SparseVector& beta, Index s,
                               const SeedSpec& seed, int max_attempts) {
  if (s < 1) throw DomainError("sparsity s must be at least 1");
  if (beta.dim() != x.cols()) throw SizeError("beta dimension does not match the design");
  if (max_attempts < 1) throw DomainError("max_attempts must be at least 1");
  SparsifyResult result;
  const double l1 = beta.l1_norm();
  double col_max = 0.0;
  for (Index j = 0; j < x.cols(); ++j) col_max = std::max(col_max, x.col(j).norm());
  result.bound = 2.0 * col_max * l1 / std::sqrt(static_cast<double>(s));
  if (beta.nnz() <= s) {
    result.beta_prime = beta;
    return result;
  }

  SparsifyResult best = result;
  best.error = std::numeric_limits<double>::infinity();
  for (int a = 0; a < max_attempts; ++a) {
    RandomStream rng(seed.child(static_cast<std::uint64_t>(a)));
    SparseVector candidate = draw(beta, l1, s, rng);
    const double err = sparsification_error(x, beta, candidate);
    if (err < best.error) {
      best.beta_prime = std::move(candidate);
      best.error = err;
    }
    best.attempts = a + 1;
    if (best.error <= result.bound) return best;
  }
  throw SparsifyFailure("no Maurey sample met the error bound within " +
                            std::to_string(max_attempts) + " attempts",
                        best);
}

SparsifyResult maurey_sparsify(const DesignMatrix& x, const Vector& beta, Index s,
                               const SeedSpec& seed, int max_attempts) {
  return maurey_sparsify(x, SparseVector::from_dense(beta), s, seed, max_attempts);
}

}  // namespace rotlasso
