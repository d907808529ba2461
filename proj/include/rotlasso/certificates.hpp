#pragma once

#include "rotlasso/core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace rotlasso {

// ---------------------------------------------------------------------------
// Cone
// ---------------------------------------------------------------------------

/// C_L(S) = { z : ||z_{S^c}||_1 <= L ||z_S||_1 }.
struct ConeSpec {
  SupportSet support;
  double slack = 1.0;

  void validate() const;
};

bool cone_membership(const SparseVector& z, const ConeSpec& cone);
bool cone_membership(const Vector& z, const ConeSpec& cone);

/// Euclidean projection onto the (non-convex) cone. The nearest point always
/// lies in the orthant of z restricted to S, where the cone is convex, so the
/// projection is computed exactly there.
Vector project_onto_cone(const Vector& z, const ConeSpec& cone);

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

enum class CertificateKind { kReGamma, kReGammaPrime, kRno, kRip, kLambdaMin };
enum class CertificateMethod { kMultistart, kGridOracle, kExactSvd, kEnumeration, kSampled };

std::string to_string(CertificateKind kind);
std::string to_string(CertificateMethod method);

struct SolverReport {
  std::int64_t iterations = 0;
  int restarts = 0;
  double residual = 0.0;
  bool converged = true;
  /// Max minus min final value across restarts (multistart only).
  double spread = 0.0;
};

struct SupportPair {
  SupportSet alpha;
  SupportSet beta;
};

using Witness = std::variant<SparseVector, SupportPair, SupportSet>;

/// For minimization kinds (re_*, lambda_min) `value` is the objective at the
/// witness and hence an upper bound on the constant. For maximization kinds
/// (rno, rip) it is exact for complete enumerations and a lower bound when sampled.
struct Certificate {
  CertificateKind kind = CertificateKind::kReGamma;
  double value = 0.0;
  Witness witness;
  CertificateMethod method = CertificateMethod::kMultistart;
  SolverReport report;
  std::string note;
};

// ---------------------------------------------------------------------------
// Restricted eigenvalue
// ---------------------------------------------------------------------------

enum class ReMode { kGamma, kGammaPrime };
enum class ReMethod { kMultistart, kGridOracle };

struct ReOptions {
  int starts = 64;
  double grid_step_degrees = 2.0;
  std::int64_t iteration_cap = 100000;
  double inner_tolerance = 1e-9;
  SeedSpec seed{};
  /// Extra feasible starting points (any cone point is a valid upper bound).
  std::vector<SparseVector> extra_starts;
};

/// Ratio (1/n)||Xz||^2 / ||z_S||^2 (gamma) or / ||z||^2 (gamma_prime), with S
/// the cone support. Returns +inf when the denominator vanishes.
double re_objective(const DesignMatrix& x, const SparseVector& z, const SupportSet& s, ReMode mode);

/// Upper-bound certificate for gamma_S(X) or gamma'_S(X) over the cone.
/// Grid oracle: gamma mode, |S| <= 3 and d <= 12 only.
Certificate re_constant(const DesignMatrix& x, const ConeSpec& cone, ReMode mode,
                        ReMethod method, const ReOptions& options = {});

Certificate lambda_min_restricted(const DesignMatrix& x, const SupportSet& s);

// ---------------------------------------------------------------------------
// Restricted normalized orthogonality and RIP
// ---------------------------------------------------------------------------

class EnumerationTooLargeError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Cosine of the smallest principal angle between span(X_{S_alpha}) and
/// span(X_{S_beta}); 0 when either span is trivial.
double rno_fixed_supports(const DesignMatrix& x, const SupportSet& s, const SupportSet& s_alpha,
                          const SupportSet& s_beta);

/// Exact RNO constant by enumerating supports of size min(s, |S|) inside S
/// and min(s, |S^c|) inside S^c.
Certificate rno_constant(const DesignMatrix& x, const SupportSet& s, Index sparsity,
                         std::uint64_t cap = kDefaultEnumerationCap);

/// Lower bound from `pairs` random support pairs.
Certificate rno_constant_sampled(const DesignMatrix& x, const SupportSet& s, Index sparsity,
                                 std::uint64_t pairs, const SeedSpec& seed);

/// delta_s of a unit-column matrix: max over |T| = s of
/// max(1 - sigma_min(X_T), sigma_max(X_T) - 1).
Certificate rip_constant(const DesignMatrix& x_unit, Index sparsity,
                         std::uint64_t cap = kDefaultEnumerationCap);

Certificate rip_constant_sampled(const DesignMatrix& x_unit, Index sparsity,
                                 std::uint64_t supports, const SeedSpec& seed);

/// 4 delta / (1 - delta)^2.
double rip_to_rno_bound(double delta);

/// (1 - eps - C sqrt(|S'| / (gamma_S * s))) * gamma_S.
double rno_to_re_lower_bound(double epsilon, Index sparsity, Index s_prime_size, double gamma_s,
                             double c);

// ---------------------------------------------------------------------------
// Partial rotation Monte Carlo
// ---------------------------------------------------------------------------

using DesignGenerator = std::function<DesignMatrix(const SeedSpec&)>;

struct FailureRate {
  double rate = 0.0;
  std::int64_t exceedances = 0;
  std::int64_t trials = 0;
};

/// Fraction of regenerated designs for which the normalized inner product of
/// X_S alpha and X_{S^c} beta exceeds epsilon in absolute value.
FailureRate partial_rotation_failure_rate(const DesignGenerator& generate, const SupportSet& s,
                                          const SparseVector& alpha, const SparseVector& beta,
                                          double epsilon, std::int64_t trials,
                                          const SeedSpec& seed);

}  // namespace rotlasso
