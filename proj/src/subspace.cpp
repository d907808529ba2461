#include "rotlasso/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rotlasso {

namespace {

Matrix gather_columns(const DesignMatrix& x, const std::vector<Index>& cols) {
  Matrix m(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Index>(j)) = x.col(cols[j]);
  return m;
}

std::vector<Index> pick(const std::vector<Index>& from, const std::vector<Index>& positions) {
  std::vector<Index> out;
  out.reserve(positions.size());
  for (Index p : positions) out.push_back(from[static_cast<std::size_t>(p)]);
  return out;
}

double largest_cosine(const Matrix& basis_a, const Matrix& basis_b) {
  if (basis_a.cols() == 0 || basis_b.cols() == 0) return 0.0;
  const Matrix cross = basis_a.transpose() * basis_b;
  Eigen::JacobiSVD<Matrix> svd(cross);
  return std::min(svd.singularValues()(0), 1.0);
}

double rip_deviation(const Matrix& cols) {
  Eigen::JacobiSVD<Matrix> svd(cols);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  // Fewer rows than columns leaves a zero singular value.
  const double smin = cols.cols() > cols.rows() ? 0.0 : sv(sv.size() - 1);
  return std::max(1.0 - smin, smax - 1.0);
}

void check_rno_supports(const SupportSet& s, const SupportSet& a, const SupportSet& b) {
  if (!a.subset_of(s)) throw InvalidSupportError("S_alpha must lie inside S");
  const SupportSet comp = s.complement();
  if (!b.subset_of(comp)) throw InvalidSupportError("S_beta must lie inside the complement of S");
}

}  // namespace

Certificate lambda_min_restricted(const DesignMatrix& x, const SupportSet& s) {
  if (s.empty()) throw InvalidSupportError("lambda_min needs a non-empty support");
  const DesignMatrix xs = restrict_columns(x, s);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(xs.scaled_gram());
  Certificate cert;
  cert.kind = CertificateKind::kLambdaMin;
  cert.method = CertificateMethod::kExactSvd;
  cert.value = eig.eigenvalues()(0);
  Vector z = Vector::Zero(x.cols());
  const Vector v = eig.eigenvectors().col(0);
  for (Index i = 0; i < s.size(); ++i) z(s[i]) = v(i);
  cert.witness = SparseVector::from_dense(z);
  cert.report.iterations = 1;
  return cert;
}

double rno_fixed_supports(const DesignMatrix& x, const SupportSet& s, const SupportSet& s_alpha,
                          const SupportSet& s_beta) {
  if (s.dim() != x.cols()) throw InvalidSupportError("support dimension does not match design");
  check_rno_supports(s, s_alpha, s_beta);
  if (s_alpha.empty() || s_beta.empty()) return 0.0;
  const Matrix phi_a = orthonormal_basis(gather_columns(x, s_alpha.indices()));
  const Matrix phi_b = orthonormal_basis(gather_columns(x, s_beta.indices()));
  return largest_cosine(phi_a, phi_b);
}

Certificate rno_constant(const DesignMatrix& x, const SupportSet& s, Index sparsity,
                         std::uint64_t cap) {
  if (s.dim() != x.cols()) throw InvalidSupportError("support dimension does not match design");
  if (sparsity < 1) throw DomainError("sparsity s must be at least 1");
  const SupportSet comp = s.complement();
  // s-sparse means at most s non-zeros: a block narrower than s is taken whole.
  const Index sa = std::min(sparsity, s.size());
  const Index sb = std::min(sparsity, comp.size());

  Certificate cert;
  cert.kind = CertificateKind::kRno;
  cert.method = CertificateMethod::kEnumeration;
  cert.value = 0.0;
  cert.witness = SupportPair{SupportSet::empty_of(x.cols()), SupportSet::empty_of(x.cols())};
  if (sa == 0 || sb == 0) return cert;

  const std::uint64_t na = binomial(static_cast<std::uint64_t>(s.size()), static_cast<std::uint64_t>(sa));
  const std::uint64_t nb =
      binomial(static_cast<std::uint64_t>(comp.size()), static_cast<std::uint64_t>(sb));
  const unsigned __int128 pairs = static_cast<unsigned __int128>(na) * nb;
  if (pairs > cap)
    throw EnumerationTooLargeError("RNO enumeration needs " + std::to_string(static_cast<double>(pairs)) +
                                   " support pairs, above the cap of " + std::to_string(cap) +
                                   "; use sampling mode (--sample-pairs) for a lower bound");

  // Cache the bases of the side with fewer subsets; stream the other side.
  struct Side {
    std::vector<Index> columns;
    Index size;
  };
  const Side side_a{s.indices(), sa};
  const Side side_b{comp.indices(), sb};
  const bool cache_a = na <= nb;
  const Side& cached = cache_a ? side_a : side_b;
  const Side& streamed = cache_a ? side_b : side_a;

  std::vector<Matrix> bases;
  std::vector<std::vector<Index>> cached_sets;
  for_each_combination(static_cast<Index>(cached.columns.size()), cached.size,
                       [&](const std::vector<Index>& pos) {
                         cached_sets.push_back(pick(cached.columns, pos));
                         bases.push_back(orthonormal_basis(gather_columns(x, cached_sets.back())));
                       });

  double best = -1.0;
  std::uint64_t best_a = 0, best_b = 0;
  std::uint64_t streamed_rank = 0;
  std::vector<Index> best_set_a, best_set_b;
  std::int64_t evaluated = 0;
  for_each_combination(
      static_cast<Index>(streamed.columns.size()), streamed.size, [&](const std::vector<Index>& pos) {
        const std::vector<Index> set = pick(streamed.columns, pos);
        const Matrix basis = orthonormal_basis(gather_columns(x, set));
        for (std::size_t c = 0; c < bases.size(); ++c) {
          const double v = largest_cosine(bases[c], basis);
          ++evaluated;
          const std::uint64_t ra = cache_a ? c : streamed_rank;
          const std::uint64_t rb = cache_a ? streamed_rank : c;
          // Ties go to the lexicographically smallest (alpha, beta) pair.
          if (v > best || (v == best && std::make_pair(ra, rb) < std::make_pair(best_a, best_b))) {
            best = v;
            best_a = ra;
            best_b = rb;
            best_set_a = cache_a ? cached_sets[c] : set;
            best_set_b = cache_a ? set : cached_sets[c];
          }
        }
        ++streamed_rank;
      });
  cert.value = std::max(best, 0.0);
  cert.witness = SupportPair{SupportSet(x.cols(), best_set_a), SupportSet(x.cols(), best_set_b)};
  cert.report.iterations = evaluated;
  return cert;
}

Certificate rno_constant_sampled(const DesignMatrix& x, const SupportSet& s, Index sparsity,
                                 std::uint64_t pairs, const SeedSpec& seed) {
  if (s.dim() != x.cols()) throw InvalidSupportError("support dimension does not match design");
  if (sparsity < 1) throw DomainError("sparsity s must be at least 1");
  const SupportSet comp = s.complement();
  const Index sa = std::min(sparsity, s.size());
  const Index sb = std::min(sparsity, comp.size());
  Certificate cert;
  cert.kind = CertificateKind::kRno;
  cert.method = CertificateMethod::kSampled;
  cert.witness = SupportPair{SupportSet::empty_of(x.cols()), SupportSet::empty_of(x.cols())};
  if (sa == 0 || sb == 0) return cert;
  RandomStream rng(seed);
  double best = -1.0;
  for (std::uint64_t i = 0; i < pairs; ++i) {
    const SupportSet a = random_support(s.size(), sa, rng).lift_into(s);
    const SupportSet b = random_support(comp.size(), sb, rng).lift_into(comp);
    const double v = rno_fixed_supports(x, s, a, b);
    if (v > best) {
      best = v;
      cert.witness = SupportPair{a, b};
    }
  }
  cert.value = std::max(best, 0.0);
  cert.report.iterations = static_cast<std::int64_t>(pairs);
  cert.note = "lower bound from sampled support pairs";
  return cert;
}

Certificate rip_constant(const DesignMatrix& x_unit, Index sparsity, std::uint64_t cap) {
  const Index d = x_unit.cols();
  if (sparsity < 1 || sparsity > d) throw DomainError("RIP sparsity must lie in [1, d]");
  const std::uint64_t count =
      binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(sparsity));
  if (count > cap)
    throw EnumerationTooLargeError("RIP enumeration needs " + std::to_string(count) +
                                   " supports, above the cap of " + std::to_string(cap) +
                                   "; use sampling mode for a lower bound");
  Certificate cert;
  cert.kind = CertificateKind::kRip;
  cert.method = CertificateMethod::kEnumeration;
  double best = -1.0;
  std::vector<Index> best_set;
  std::int64_t evaluated = 0;
  for_each_combination(d, sparsity, [&](const std::vector<Index>& set) {
    const double dev = rip_deviation(gather_columns(x_unit, set));
    ++evaluated;
    if (dev > best) {
      best = dev;
      best_set = set;
    }
  });
  cert.value = std::max(best, 0.0);
  cert.witness = SupportSet(d, best_set);
  cert.report.iterations = evaluated;
  return cert;
}

Certificate rip_constant_sampled(const DesignMatrix& x_unit, Index sparsity,
                                 std::uint64_t supports, const SeedSpec& seed) {
  const Index d = x_unit.cols();
  if (sparsity < 1 || sparsity > d) throw DomainError("RIP sparsity must lie in [1, d]");
  Certificate cert;
  cert.kind = CertificateKind::kRip;
  cert.method = CertificateMethod::kSampled;
  RandomStream rng(seed);
  double best = -1.0;
  SupportSet best_set = SupportSet::empty_of(d);
  for (std::uint64_t i = 0; i < supports; ++i) {
    const SupportSet t = random_support(d, sparsity, rng);
    const double dev = rip_deviation(gather_columns(x_unit, t.indices()));
    if (dev > best) {
      best = dev;
      best_set = t;
    }
  }
  cert.value = std::max(best, 0.0);
  cert.witness = best_set;
  cert.report.iterations = static_cast<std::int64_t>(supports);
  cert.note = "lower bound from sampled supports";
  return cert;
}

FailureRate partial_rotation_failure_rate(const DesignGenerator& generate, const SupportSet& s,
                                          const SparseVector& alpha, const SparseVector& beta,
                                          double epsilon, std::int64_t trials,
                                          const SeedSpec& seed) {
  if (trials < 1) throw DomainError("failure rate needs at least one trial");
  if (alpha.dim() != s.size()) throw InvalidSupportError("alpha must have dimension |S|");
  if (beta.dim() != s.dim() - s.size()) throw InvalidSupportError("beta must have dimension |S^c|");
  const SupportSet comp = s.complement();
  FailureRate out;
  out.trials = trials;
  for (std::int64_t t = 0; t < trials; ++t) {
    const DesignMatrix x = generate(seed.child(static_cast<std::uint64_t>(t)));
    if (x.cols() != s.dim()) throw InvalidSupportError("generated design does not match support");
    Vector u = Vector::Zero(x.rows());
    Vector v = Vector::Zero(x.rows());
    for (const auto& [j, a] : alpha.terms()) u += a * x.col(s[j]);
    for (const auto& [j, b] : beta.terms()) v += b * x.col(comp[j]);
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0)
      throw DegenerateColumnError("degenerate combination: X_S alpha or X_{S^c} beta vanishes");
    if (std::abs(u.dot(v) / (nu * nv)) > epsilon) ++out.exceedances;
  }
  out.rate = static_cast<double>(out.exceedances) / static_cast<double>(trials);
  return out;
}

}  // namespace rotlasso
