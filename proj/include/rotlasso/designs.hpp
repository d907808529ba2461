#pragma once

#include "rotlasso/core.hpp"

#include <string>
#include <vector>

namespace rotlasso {

enum class RotationVariant { kHaarOrthogonal, kGaussianIid, kRademacherIid };

/// Distribution of the n x n matrix R applied to one column block.
/// Gaussian entries have standard deviation `sigma`; Rademacher entries are +-sigma.
struct RotationKind {
  RotationVariant variant = RotationVariant::kHaarOrthogonal;
  double sigma = 1.0;

  static RotationKind haar() { return {RotationVariant::kHaarOrthogonal, 1.0}; }
  static RotationKind gaussian(double sigma = 1.0) { return {RotationVariant::kGaussianIid, sigma}; }
  static RotationKind rademacher(double sigma = 1.0) {
    return {RotationVariant::kRademacherIid, sigma};
  }

  void validate() const;
};

std::string to_string(RotationVariant v);
/// Accepts "haar", "gaussian", "rademacher".
RotationKind parse_rotation(const std::string& name, double sigma = 1.0);

/// (epsilon, delta) of a partially-rotated family: inner products between
/// normalized combinations of the two blocks exceed epsilon with probability
/// at most exp(-delta * n).
struct PartialRotationParams {
  double epsilon = 0.5;
  double delta = 1.0;

  void validate() const;
};

Matrix sample_rotation(const RotationKind& kind, Index n, const SeedSpec& seed);

/// Applies R to the columns outside `s`, in place, and rescales them to norm
/// sqrt(n). Columns in `s` are copied bit-for-bit.
DesignMatrix partially_rotate(const DesignMatrix& x, const SupportSet& s,
                              const RotationKind& kind, const SeedSpec& seed);

/// Model 1: columns in `support` are replaced by fresh Gaussian columns of norm sqrt(n).
DesignMatrix semirandom_gaussian_design(const DesignMatrix& x, const SupportSet& support,
                                        const SeedSpec& seed);

/// Model 2: appends R a_j (re-normalized) after the columns of `x`.
DesignMatrix rotated_adversary_design(const DesignMatrix& x, const Matrix& adversary_cols,
                                      const RotationKind& kind, const SeedSpec& seed);

struct CounterexampleDesign {
  DesignMatrix x;
  SupportSet support;
};

/// Columns 0..k-1 are sqrt(n) e_i, columns k and k+1 are the same rotated
/// vector, the remaining columns are random directions scaled to sqrt(n).
CounterexampleDesign counterexample_design(Index n, Index d, Index k, const SeedSpec& seed);

/// The witness (1,...,1, k/2, -k/2, 0, ...) for the counterexample design.
SparseVector counterexample_witness(Index d, Index k);

struct ColumnGroup {
  std::vector<Index> columns;
  /// Relative perturbation of each member around the group representative;
  /// 0 means exact copies.
  double rho = 0.0;
};

struct BlockSpec {
  std::vector<ColumnGroup> groups;

  /// Splits the complement of `s` into consecutive groups of `group_size`.
  static BlockSpec contiguous(const SupportSet& s, Index group_size, double rho = 0.0);
  /// Splits the complement of `s` into `num_groups` nearly equal consecutive groups.
  static BlockSpec with_groups(const SupportSet& s, Index num_groups, double rho = 0.0);
};

/// Columns in `s` are i.i.d. Gaussian; each group of the complement repeats a
/// Gaussian representative (exactly, or perturbed by rho and re-normalized).
DesignMatrix correlated_block_design(Index n, Index d, const SupportSet& s,
                                     const BlockSpec& blocks, const SeedSpec& seed);

/// All entries i.i.d. Gaussian, columns rescaled to sqrt(n).
DesignMatrix gaussian_design(Index n, Index d, const SeedSpec& seed);

/// Columns sqrt(n) e_j; requires n >= d.
DesignMatrix orthonormal_design(Index n, Index d);

}  // namespace rotlasso
