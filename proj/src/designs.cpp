#include "rotlasso/designs.hpp"

#include <cmath>
#include <string>

namespace rotlasso {

namespace {

// Stream tags keep the draws of different generator stages independent.
constexpr std::uint64_t kTagRotation = 1;
constexpr std::uint64_t kTagColumns = 2;
constexpr std::uint64_t kTagGroups = 3;
constexpr std::uint64_t kTagAdversary = 4;

double sqrt_n(Index n) { return std::sqrt(static_cast<double>(n)); }

void rescale_to_sqrt_n(Eigen::Ref<Vector> col, Index j) {
  const double target = sqrt_n(col.size());
  const double norm = col.norm();
  if (!(norm >= kColumnNormTol * target))
    throw DegenerateColumnError("column " + std::to_string(j) +
                                " collapsed after rotation (norm " + std::to_string(norm) + ")");
  col *= target / norm;
}

Vector gaussian_column(RandomStream& rng, Index n) {
  Vector v = rng.unit_sphere(n);
  return v * sqrt_n(n);
}

// Applies R (drawn from `seed`) to the columns of `m`.
Matrix apply_rotation(const RotationKind& kind, const Matrix& m, const SeedSpec& seed) {
  const Index n = m.rows();
  if (kind.variant == RotationVariant::kHaarOrthogonal) {
    RandomStream rng(seed);
    const Matrix g = rng.normal_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    // R_haar = Q * diag(sign(r_ii)); apply the diagonal first, then Q.
    const Matrix& packed = qr.matrixQR();
    Matrix scaled = m;
    for (Index i = 0; i < n; ++i)
      if (packed(i, i) < 0.0) scaled.row(i) *= -1.0;
    return qr.householderQ() * scaled;
  }
  return sample_rotation(kind, n, seed) * m;
}

}  // namespace

void RotationKind::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("rotation scale sigma must be positive");
}

std::string to_string(RotationVariant v) {
  switch (v) {
    case RotationVariant::kHaarOrthogonal: return "haar";
    case RotationVariant::kGaussianIid: return "gaussian";
    case RotationVariant::kRademacherIid: return "rademacher";
  }
  return "unknown";
}

RotationKind parse_rotation(const std::string& name, double sigma) {
  RotationKind kind;
  if (name == "haar" || name == "haar_orthogonal") {
    kind = RotationKind::haar();
  } else if (name == "gaussian" || name == "gaussian_iid") {
    kind = RotationKind::gaussian(sigma);
  } else if (name == "rademacher" || name == "rademacher_iid") {
    kind = RotationKind::rademacher(sigma);
  } else {
    throw ParseError("unknown rotation kind '" + name + "'");
  }
  kind.validate();
  return kind;
}

void PartialRotationParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
}

Matrix sample_rotation(const RotationKind& kind, Index n, const SeedSpec& seed) {
  kind.validate();
  if (n < 1) throw SizeError("rotation dimension must be positive");
  RandomStream rng(seed);
  switch (kind.variant) {
    case RotationVariant::kHaarOrthogonal: {
      const Matrix g = rng.normal_matrix(n, n);
      Eigen::HouseholderQR<Matrix> qr(g);
      Matrix q = qr.householderQ() * Matrix::Identity(n, n);
      const Matrix& packed = qr.matrixQR();
      for (Index i = 0; i < n; ++i)
        if (packed(i, i) < 0.0) q.col(i) *= -1.0;
      return q;
    }
    case RotationVariant::kGaussianIid:
      return rng.normal_matrix(n, n) * kind.sigma;
    case RotationVariant::kRademacherIid: {
      Matrix r(n, n);
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) r(i, j) = rng.rademacher() * kind.sigma;
      return r;
    }
  }
  throw DomainError("unknown rotation variant");
}

DesignMatrix partially_rotate(const DesignMatrix& x, const SupportSet& s,
                              const RotationKind& kind, const SeedSpec& seed) {
  kind.validate();
  if (!x.normalized()) throw DomainError("partially_rotate requires a normalized design");
  if (s.dim() != x.cols()) throw InvalidSupportError("support dimension does not match design");
  const SupportSet comp = s.complement();
  Matrix out = x.entries();
  if (comp.empty()) return DesignMatrix(std::move(out), true);

  Matrix block(x.rows(), comp.size());
  for (Index j = 0; j < comp.size(); ++j) block.col(j) = x.col(comp[j]);
  Matrix rotated = apply_rotation(kind, block, seed.child(kTagRotation));
  for (Index j = 0; j < comp.size(); ++j) {
    rescale_to_sqrt_n(rotated.col(j), comp[j]);
    out.col(comp[j]) = rotated.col(j);
  }
  return DesignMatrix(std::move(out), true);
}

DesignMatrix semirandom_gaussian_design(const DesignMatrix& x, const SupportSet& support,
                                        const SeedSpec& seed) {
  if (!x.normalized()) throw DomainError("semirandom_gaussian_design requires a normalized design");
  if (support.dim() != x.cols()) throw InvalidSupportError("support dimension does not match design");
  Matrix out = x.entries();
  RandomStream rng(seed.child(kTagColumns));
  for (Index j : support.indices()) out.col(j) = gaussian_column(rng, x.rows());
  return DesignMatrix(std::move(out), true);
}

DesignMatrix rotated_adversary_design(const DesignMatrix& x, const Matrix& adversary_cols,
                                      const RotationKind& kind, const SeedSpec& seed) {
  kind.validate();
  if (!x.normalized()) throw DomainError("rotated_adversary_design requires a normalized design");
  if (adversary_cols.cols() == 0) return x;
  if (adversary_cols.rows() != x.rows())
    throw SizeError("adversary columns must have the same number of rows as the design");
  Matrix adv = adversary_cols;
  for (Index j = 0; j < adv.cols(); ++j) rescale_to_sqrt_n(adv.col(j), x.cols() + j);
  Matrix rotated = apply_rotation(kind, adv, seed.child(kTagRotation));
  Matrix out(x.rows(), x.cols() + adv.cols());
  out.leftCols(x.cols()) = x.entries();
  for (Index j = 0; j < adv.cols(); ++j) {
    rescale_to_sqrt_n(rotated.col(j), x.cols() + j);
    out.col(x.cols() + j) = rotated.col(j);
  }
  return DesignMatrix(std::move(out), true);
}

CounterexampleDesign counterexample_design(Index n, Index d, Index k, const SeedSpec& seed) {
  if (k < 1) throw SizeError("counterexample needs k >= 1");
  if (n < k + 2 || d < k + 2) throw SizeError("counterexample needs n >= k+2 and d >= k+2");
  const double root_n = sqrt_n(n);
  Matrix out = Matrix::Zero(n, d);
  for (Index i = 0; i < k; ++i) out(i, i) = root_n;

  RandomStream rng(seed.child(kTagAdversary));
  const Matrix a = gaussian_column(rng, n);
  Matrix ra = apply_rotation(RotationKind::haar(), a, seed.child(kTagRotation));
  rescale_to_sqrt_n(ra.col(0), k);
  out.col(k) = ra.col(0);
  out.col(k + 1) = ra.col(0);

  RandomStream extra(seed.child(kTagColumns));
  for (Index j = k + 2; j < d; ++j) out.col(j) = gaussian_column(extra, n);
  return {DesignMatrix(std::move(out), true), SupportSet::range(d, 0, k)};
}

SparseVector counterexample_witness(Index d, Index k) {
  if (d < k + 2) throw SizeError("counterexample witness needs d >= k+2");
  std::vector<SparseVector::Term> terms;
  for (Index i = 0; i < k; ++i) terms.emplace_back(i, 1.0);
  terms.emplace_back(k, static_cast<double>(k) / 2.0);
  terms.emplace_back(k + 1, -static_cast<double>(k) / 2.0);
  return SparseVector(d, std::move(terms));
}

BlockSpec BlockSpec::contiguous(const SupportSet& s, Index group_size, double rho) {
  if (group_size < 1) throw SpecError("group size must be positive");
  const SupportSet comp = s.complement();
  BlockSpec spec;
  for (Index start = 0; start < comp.size(); start += group_size) {
    ColumnGroup g;
    g.rho = rho;
    for (Index j = start; j < std::min(comp.size(), start + group_size); ++j)
      g.columns.push_back(comp[j]);
    spec.groups.push_back(std::move(g));
  }
  return spec;
}

BlockSpec BlockSpec::with_groups(const SupportSet& s, Index num_groups, double rho) {
  const SupportSet comp = s.complement();
  if (num_groups < 1) throw SpecError("number of groups must be positive");
  if (num_groups > comp.size()) num_groups = comp.size();
  BlockSpec spec;
  Index start = 0;
  for (Index g = 0; g < num_groups; ++g) {
    const Index len = comp.size() / num_groups + (g < comp.size() % num_groups ? 1 : 0);
    ColumnGroup group;
    group.rho = rho;
    for (Index j = start; j < start + len; ++j) group.columns.push_back(comp[j]);
    start += len;
    spec.groups.push_back(std::move(group));
  }
  return spec;
}

DesignMatrix correlated_block_design(Index n, Index d, const SupportSet& s,
                                     const BlockSpec& blocks, const SeedSpec& seed) {
  if (n < 1 || d < 1) throw SizeError("design dimensions must be positive");
  if (s.dim() != d) throw InvalidSupportError("support dimension does not match d");
  std::vector<int> owner(static_cast<std::size_t>(d), -1);
  for (std::size_t g = 0; g < blocks.groups.size(); ++g) {
    const auto& group = blocks.groups[g];
    if (group.columns.empty()) throw SpecError("block spec contains an empty group");
    if (!(group.rho >= 0.0) || !std::isfinite(group.rho))
      throw SpecError("group perturbation must be non-negative");
    for (Index j : group.columns) {
      if (j < 0 || j >= d) throw SpecError("block spec column out of range");
      if (s.contains(j)) throw SpecError("block spec assigns a support column to a group");
      if (owner[static_cast<std::size_t>(j)] != -1)
        throw SpecError("block spec assigns a column to two groups");
      owner[static_cast<std::size_t>(j)] = static_cast<int>(g);
    }
  }
  for (Index j = 0; j < d; ++j)
    if (!s.contains(j) && owner[static_cast<std::size_t>(j)] == -1)
      throw SpecError("block spec leaves column " + std::to_string(j) + " unassigned");

  Matrix out(n, d);
  RandomStream cols(seed.child(kTagColumns));
  for (Index j : s.indices()) out.col(j) = gaussian_column(cols, n);

  RandomStream grp(seed.child(kTagGroups));
  for (const auto& group : blocks.groups) {
    const Vector rep = grp.unit_sphere(n);
    for (Index j : group.columns) {
      if (group.rho == 0.0) {
        out.col(j) = rep * sqrt_n(n);
      } else {
        Vector v = rep + group.rho * grp.unit_sphere(n);
        rescale_to_sqrt_n(v, j);
        out.col(j) = v;
      }
    }
  }
  return DesignMatrix(std::move(out), true);
}

DesignMatrix gaussian_design(Index n, Index d, const SeedSpec& seed) {
  if (n < 1 || d < 1) throw SizeError("design dimensions must be positive");
  RandomStream rng(seed.child(kTagColumns));
  Matrix out(n, d);
  for (Index j = 0; j < d; ++j) out.col(j) = gaussian_column(rng, n);
  return DesignMatrix(std::move(out), true);
}

DesignMatrix orthonormal_design(Index n, Index d) {
  if (n < d) throw SizeError("orthonormal design needs n >= d");
  Matrix out = Matrix::Zero(n, d);
  for (Index j = 0; j < d; ++j) out(j, j) = sqrt_n(n);
  return DesignMatrix(std::move(out), true);
}

}  // namespace rotlasso
