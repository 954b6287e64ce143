#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace m3link {

// Exact arithmetic substrate. All homology computations run over these types;
// there is deliberately no machine-word fast path.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(const Int& a, const Int& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Int lcm_int(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return abs_int(a / gcd_int(a, b) * b);
}

/// Extended gcd: returns g = gcd(a,b) and s,t with s*a + t*b = g, g >= 0.
inline void egcd(const Int& a, const Int& b, Int& g, Int& s, Int& t) {
  Int r0 = a, r1 = b;
  Int s0 = 1, s1 = 0;
  Int t0 = 0, t1 = 1;
  while (r1 != 0) {
    Int q = r0 / r1;  // truncated division is fine here
    Int r2 = r0 - q * r1;
    Int s2 = s0 - q * s1;
    Int t2 = t0 - q * t1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
    t0 = t1; t1 = t2;
  }
  if (r0 < 0) { r0 = -r0; s0 = -s0; t0 = -t0; }
  g = r0; s = s0; t = t0;
}

/// Floor-convention remainder: result in [0, |m|). m must be nonzero.
inline Int mod_floor(const Int& a, const Int& m) {
  Int mm = abs_int(m);
  Int r = a % mm;
  if (r < 0) r += mm;
  return r;
}

/// Inverse of a mod m (m >= 1); throws if gcd(a,m) != 1.
inline Int mod_inverse(const Int& a, const Int& m) {
  if (m == 1) return 0;
  Int g, s, t;
  egcd(mod_floor(a, m), m, g, s, t);
  if (g != 1) throw std::domain_error("mod_inverse: not a unit");
  return mod_floor(s, m);
}

/// All units of Z/m, ascending. units_mod(1) = {0} (the unique residue).
inline std::vector<Int> units_mod(const Int& m) {
  if (m <= 1) return {Int(0)};
  std::vector<Int> out;
  for (Int k = 1; k < m; ++k)
    if (gcd_int(k, m) == 1) out.push_back(k);
  return out;
}

/// Prime factorization by trial division, as (prime, exponent) pairs.
/// Intended for the small orders that appear in group catalogs.
inline std::vector<std::pair<Int, int>> factorize(Int n) {
  if (n < 0) n = -n;
  std::vector<std::pair<Int, int>> out;
  if (n <= 1) return out;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) { n /= p; ++e; }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Largest power of p dividing n (n != 0).
inline Int p_part(const Int& n, const Int& p) {
  Int m = abs_int(n), q = 1;
  while (m % p == 0) { m /= p; q *= p; }
  return q;
}

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw std::domain_error("make_rat: zero denominator");
  return Rat(num, den);
}

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

/// Fractional part in [0, 1).
inline Rat rat_frac(const Rat& r) {
  Int n = rat_num(r), d = rat_den(r);
  return Rat(mod_floor(n, d), d);
}

inline long to_long_checked(const Int& v, const char* what) {
  if (v > (std::numeric_limits<long>::max)() || v < (std::numeric_limits<long>::min)())
    throw std::overflow_error(std::string("value does not fit a long: ") + what);
  return static_cast<long>(v);
}

}  // namespace m3link
