#include "rotlasso/core.hpp"

#include <cmath>
#include <numbers>

namespace rotlasso {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

SeedSpec SeedSpec::child(std::uint64_t tag) const {
  const std::uint64_t mixed =
      splitmix64(splitmix64(stream_id) ^ (tag * 0xD6E8FEB86659FD93ull + 0x632BE59BD9B4E019ull));
  return SeedSpec{master_seed, mixed};
}

void philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key[2],
                   std::uint32_t out[4]) {
  std::uint32_t c0 = counter[0], c1 = counter[1], c2 = counter[2], c3 = counter[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c0, hi0, lo0);
    mulhilo(kPhiloxM1, c2, hi1, lo1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

RandomStream::RandomStream(const SeedSpec& spec) : spec_(spec) {}

void RandomStream::refill() {
  const std::uint32_t counter[4] = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(spec_.stream_id),
      static_cast<std::uint32_t>(spec_.stream_id >> 32)};
  const std::uint32_t key[2] = {static_cast<std::uint32_t>(spec_.master_seed),
                                static_cast<std::uint32_t>(spec_.master_seed >> 32)};
  std::uint32_t out[4];
  philox4x32_10(counter, key, out);
  ++block_;
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
}

RandomStream::result_type RandomStream::operator()() {
  if (buffered_ == 0) refill();
  return buffer_[2 - buffered_--];
}

double RandomStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

double RandomStream::rademacher() { return ((*this)() >> 63) ? 1.0 : -1.0; }

Index RandomStream::uniform_index(Index bound) {
  if (bound <= 0) throw DomainError("uniform_index: bound must be positive");
  const auto b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = max() - (max() % b);
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x >= limit);
  return static_cast<Index>(x % b);
}

Vector RandomStream::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Matrix RandomStream::normal_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

Vector RandomStream::unit_sphere(Index n) {
  Vector v;
  double norm = 0.0;
  do {
    v = normal_vector(n);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

RandomStream seeded_stream(const SeedSpec& spec) { return RandomStream(spec); }

}  // namespace rotlasso
