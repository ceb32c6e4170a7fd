#include "ijets/rational.hpp"

namespace ijets {

Q parse_q(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s.push_back(c);
  if (s.empty()) throw InputError("empty rational");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    // decimal literal: 1.25 -> 125/100
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t places = s.size() - dot - 1;
    mpz_class den = 1;
    for (std::size_t i = 0; i < places; ++i) den *= 10;
    Q out;
    try {
      out = Q(mpz_class(digits), den);
    } catch (const std::invalid_argument&) {
      throw InputError("bad rational literal: " + raw);
    }
    out.canonicalize();
    return out;
  }
  Q out;
  if (out.set_str(s, 10) != 0) throw InputError("bad rational literal: " + raw);
  if (out.get_den() == 0) throw InputError("zero denominator: " + raw);
  out.canonicalize();
  return out;
}

std::string q_str(const Q& v) { return v.get_str(); }

Q q_sqrt(const Q& v) {
  if (v < 0) throw MathError("negative radicand");
  mpz_class n = v.get_num(), d = v.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
    throw InexactSqrt("radicand " + v.get_str() + " is not a rational square");
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  Q out(rn, rd);
  out.canonicalize();
  return out;
}

Q factorial(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return Q(f);
}

Q binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return Q(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Q(b);
}

long long binom_ll(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Q RationalSampler::next() {
  std::uniform_int_distribution<int> num(1, 9), den(1, 5), sign(0, 1);
  Q v(num(rng_), den(rng_));
  v.canonicalize();
  return sign(rng_) ? v : Q(-v);
}

Q RationalSampler::next_positive() {
  Q v = next();
  return v < 0 ? Q(-v) : v;
}

}  // namespace ijets
