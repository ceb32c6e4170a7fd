#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ijets {

using Q = mpq_class;

/// Thrown when an exact square root does not exist in Q.
struct InexactSqrt : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Any failure that is mathematical rather than an input problem.
struct MathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input (bad JSON, unknown identifier, ...).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Q parse_q(const std::string& s);
std::string q_str(const Q& v);
Q q_sqrt(const Q& v);  // exact or throws InexactSqrt
Q factorial(int n);
Q binomial(int n, int k);
long long binom_ll(int n, int k);

/// Seeded source of small nonzero rationals.
class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}
  Q next();              // num in [-9,9]\{0}, den in [1,5]
  Q next_positive();
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace ijets
