#include "rotlasso/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace rotlasso {

void ConeSpec::validate() const {
  if (!(slack >= 1.0) || !std::isfinite(slack)) throw DomainError("cone slack L must be >= 1");
  if (support.empty()) throw InvalidSupportError("cone support must be non-empty");
}

bool cone_membership(const SparseVector& z, const ConeSpec& cone) {
  if (z.dim() != cone.support.dim())
    throw InvalidSupportError("vector dimension does not match cone support dimension");
  double on = 0.0, off = 0.0;
  for (const auto& [j, v] : z.terms()) (cone.support.contains(j) ? on : off) += std::abs(v);
  return off <= cone.slack * on + 1e-12;
}

bool cone_membership(const Vector& z, const ConeSpec& cone) {
  return cone_membership(SparseVector::from_dense(z), cone);
}

Vector project_onto_cone(const Vector& z, const ConeSpec& cone) {
  const SupportSet& s = cone.support;
  if (z.size() != s.dim()) throw InvalidSupportError("vector dimension does not match cone");
  const double slack = cone.slack;
  const SupportSet comp = s.complement();
  double a1 = 0.0, b1 = 0.0;
  for (Index j : s.indices()) a1 += std::abs(z(j));
  for (Index j : comp.indices()) b1 += std::abs(z(j));
  if (b1 <= slack * a1) return z;

  // Stationarity: |x_S| = |a| + mu L, w = soft(b, mu), and the l1 constraint
  // ||soft(b, mu)||_1 = L ||a||_1 + mu L^2 |S| holds with equality.
  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(comp.size()));
  for (Index j : comp.indices()) c.push_back(std::abs(z(j)));
  std::sort(c.begin(), c.end(), std::greater<>());
  const double p = static_cast<double>(s.size());
  double mu = 0.0;
  double cumulative = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    cumulative += c[j];
    const double next = j + 1 < c.size() ? c[j + 1] : 0.0;
    const double candidate =
        (cumulative - slack * a1) / (static_cast<double>(j + 1) + slack * slack * p);
    if (candidate >= next) {
      mu = candidate;
      break;
    }
  }
  Vector out(z.size());
  for (Index j : s.indices()) {
    const double sign = z(j) < 0.0 ? -1.0 : 1.0;
    out(j) = sign * (std::abs(z(j)) + mu * slack);
  }
  for (Index j : comp.indices()) {
    const double mag = std::max(std::abs(z(j)) - mu, 0.0);
    out(j) = z(j) < 0.0 ? -mag : mag;
  }
  return out;
}

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kReGamma: return "re_gamma";
    case CertificateKind::kReGammaPrime: return "re_gamma_prime";
    case CertificateKind::kRno: return "rno";
    case CertificateKind::kRip: return "rip";
    case CertificateKind::kLambdaMin: return "lambda_min";
  }
  return "unknown";
}

std::string to_string(CertificateMethod method) {
  switch (method) {
    case CertificateMethod::kMultistart: return "multistart";
    case CertificateMethod::kGridOracle: return "grid_oracle";
    case CertificateMethod::kExactSvd: return "exact_svd";
    case CertificateMethod::kEnumeration: return "enumeration";
    case CertificateMethod::kSampled: return "sampled";
  }
  return "unknown";
}

double rip_to_rno_bound(double delta) {
  if (!(delta >= 0.0) || !(delta < 1.0))
    throw DomainError("rip_to_rno_bound requires 0 <= delta < 1");
  return 4.0 * delta / ((1.0 - delta) * (1.0 - delta));
}

double rno_to_re_lower_bound(double epsilon, Index sparsity, Index s_prime_size, double gamma_s,
                             double c) {
  if (!(gamma_s > 0.0)) throw DomainError("gamma_S must be positive");
  if (sparsity < 1) throw DomainError("sparsity must be at least 1");
  if (!(c > 0.0)) throw DomainError("constant C must be positive");
  const double ratio = static_cast<double>(s_prime_size) / (gamma_s * static_cast<double>(sparsity));
  return (1.0 - epsilon - c * std::sqrt(ratio)) * gamma_s;
}

}  // namespace rotlasso
