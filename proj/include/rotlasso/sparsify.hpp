#pragma once

#include "rotlasso/core.hpp"

namespace rotlasso {

struct SparsifyResult {
  SparseVector beta_prime;
  /// ||X beta - X beta'||_2.
  double error = 0.0;
  /// 2 D ||beta||_1 / sqrt(s), D the largest column norm.
  double bound = 0.0;
  int attempts = 0;
};

/// Raised when no attempt met the bound; carries the best attempt.
class SparsifyFailure : public Error {
 public:
  SparsifyFailure(const std::string& what, SparsifyResult best)
      : Error(what), best_(std::move(best)) {}
  [[nodiscard]] const SparsifyResult& best() const { return best_; }

 private:
  SparsifyResult best_;
};

inline constexpr int kDefaultSparsifyAttempts = 100;

/// Maurey's empirical method: draws s indices with probability |beta_i| / ||beta||_1
/// and retries (attempt a uses seed.child(a)) until the error meets the bound.
SparsifyResult maurey_sparsify(const DesignMatrix& x, const SparseVector& beta, Index s,
                               const SeedSpec& seed, int max_attempts = kDefaultSparsifyAttempts);
SparsifyResult maurey_sparsify(const DesignMatrix& x, const Vector& beta, Index s,
                               const SeedSpec& seed, int max_attempts = kDefaultSparsifyAttempts);

double sparsification_error(const DesignMatrix& x, const SparseVector& beta,
                            const SparseVector& beta_prime);
double sparsification_error(const DesignMatrix& x, const Vector& beta, const Vector& beta_prime);

}  // namespace rotlasso
