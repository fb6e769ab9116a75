#ifndef NEWTON_MODULI_ANGLES_HPP
#define NEWTON_MODULI_ANGLES_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace newton_moduli {

using bigint = boost::multiprecision::cpp_int;

// Reduced rational num/den in (0,1]; 1 stands for 0 mod 1.
class Angle {
public:
  Angle() : num_(1), den_(1) {}
  Angle(bigint num, bigint den) {
    if (den <= 0) throw domain_error("angle denominator must be positive");
    num %= den;
    if (num < 0) num += den;
    if (num == 0) num = den;
    const bigint g = boost::multiprecision::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }
  Angle(long long num, long long den) : Angle(bigint(num), bigint(den)) {}

  static Angle parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return Angle(bigint(text), bigint(1));
      return Angle(bigint(text.substr(0, slash)), bigint(text.substr(slash + 1)));
    } catch (const domain_error&) {
      throw;
    } catch (const std::exception&) {
      throw domain_error("cannot parse angle '" + text + "' (expected p/q)");
    }
  }

  const bigint& num() const { return num_; }
  const bigint& den() const { return den_; }

  std::string str() const { return num_.str() + "/" + den_.str(); }
  // value in (0,1]
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  // value in [0,1)
  double to_unit_interval() const { return num_ == den_ ? 0.0 : to_double(); }

  friend bool operator==(const Angle& a, const Angle& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Angle& a, const Angle& b) { return a.num_ * b.den_ < b.num_ * a.den_; }
  friend bool operator<=(const Angle& a, const Angle& b) { return !(b < a); }
  friend bool operator>(const Angle& a, const Angle& b) { return b < a; }
  friend bool operator>=(const Angle& a, const Angle& b) { return !(a < b); }

private:
  bigint num_, den_;
};

inline Angle double_angle(const Angle& t) { return Angle(2 * t.num(), t.den()); }

// 1 - t mod 1
inline Angle reflect(const Angle& t) { return Angle(t.den() - t.num(), t.den()); }

inline const Angle& half() {
  static const Angle h(1, 2);
  return h;
}

namespace detail {

inline bool is_power_of_two(const bigint& n) { return n > 0 && (n & (n - 1)) == 0; }

inline bool fits_fast(const Angle& t) { return t.den() < (bigint(1) << 62); }

// every orbit element k >= 0 of n/d (residues in (0,d]) is >= m
inline bool orbit_at_least_u64(std::uint64_t n, std::uint64_t d, std::uint64_t m) {
  std::uint64_t x = n;
  for (std::uint64_t dd = d; dd % 2 == 0; dd /= 2) {
    if (x < m) return false;
    x = 2 * x % d;
    if (x == 0) x = d;
  }
  if (x == d) return d >= m;
  // x is now periodic
  const std::uint64_t start = x;
  do {
    if (x < m) return false;
    x = 2 * x % d;
    if (x == 0) x = d;
  } while (x != start);
  return true;
}

inline bool orbit_at_least_big(bigint n, const bigint& d, const bigint& m) {
  bigint x = n;
  bigint dd = d;
  int twos = 0;
  while ((dd & 1) == 0) {
    dd >>= 1;
    ++twos;
  }
  for (int k = 0; k < twos; ++k) {
    if (x < m) return false;
    x = (2 * x) % d;
    if (x == 0) x = d;
  }
  if (x == d) return d >= m;
  const bigint start = x;
  do {
    if (x < m) return false;
    x = (2 * x) % d;
    if (x == 0) x = d;
  } while (x != start);
  return true;
}

// whole orbit of t lies in [a, 1]
inline bool orbit_stays_above(const Angle& t, const Angle& a) {
  // compare on common denominator t.den * a.den: x/t.den >= a  <=>  x * a.den >= a.num * t.den
  if (fits_fast(t) && a.den() < (bigint(1) << 62)) {
    const auto d = static_cast<std::uint64_t>(t.den());
    const auto n = static_cast<std::uint64_t>(t.num());
    const auto an = static_cast<std::uint64_t>(a.num());
    const auto ad = static_cast<std::uint64_t>(a.den());
    if (ad == d) return orbit_at_least_u64(n, d, an);
    // threshold: smallest integer x with x * ad >= an * d
    const bigint thr = (bigint(an) * d + ad - 1) / ad;
    if (thr > d) return false;
    return orbit_at_least_u64(n, d, static_cast<std::uint64_t>(thr));
  }
  const bigint thr = (a.num() * t.den() + a.den() - 1) / a.den();
  if (thr > t.den()) return false;
  return orbit_at_least_big(t.num(), t.den(), thr);
}

}  // namespace detail

inline bool in_Xi(const Angle& t) {
  if (t > half()) throw domain_error("in_Xi expects an angle in (0, 1/2]");
  return detail::orbit_stays_above(t, t);
}

enum class AngleClass { Periodic, Dyadic, StrictlyPreperiodic };

inline const char* to_string(AngleClass c) {
  switch (c) {
    case AngleClass::Periodic: return "periodic";
    case AngleClass::Dyadic: return "dyadic";
    case AngleClass::StrictlyPreperiodic: return "strictly-preperiodic-nondyadic";
  }
  return "?";
}

inline AngleClass classify_angle(const Angle& t) {
  if (detail::is_power_of_two(t.den())) return AngleClass::Dyadic;
  if ((t.den() & 1) == 1) return AngleClass::Periodic;
  return AngleClass::StrictlyPreperiodic;
}

// preperiod m and period p of the doubling orbit; the angle 0 counts as period 1
struct OrbitShape {
  int preperiod;
  int period;
};

inline OrbitShape orbit_shape(const Angle& t) {
  bigint d = t.den();
  int m = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++m;
  }
  if (d == 1) return {m, 1};
  int p = 0;
  bigint x = 1;
  do {
    x = (2 * x) % d;
    ++p;
  } while (x != 1);
  return {m, p};
}

inline bool in_C_alpha(const Angle& t, const Angle& alpha) {
  if (alpha > half() || !in_Xi(alpha)) throw domain_error("C_alpha needs alpha in Xi");
  return detail::orbit_stays_above(t, alpha);
}

struct GapInterval {
  bigint p;
  int n;
  Angle beta() const { return Angle(p, bigint(1) << n); }
  Angle alpha() const { return Angle(p, (bigint(1) << n) - 1); }
  bool contains(const Angle& t) const { return beta() < t && t < alpha(); }
  friend bool operator==(const GapInterval& a, const GapInterval& b) {
    return a.beta() == b.beta() && a.alpha() == b.alpha();
  }
};

namespace detail {

inline bool in_Xi_u64(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (2 * num > den) return false;
  return orbit_at_least_u64(num, den, num);
}

// endpoints of a component are in Xi; a dyadic endpoint in Xi forces the component
inline bool is_gap_candidate(const bigint& p, int n) {
  if (n <= 30) {
    const auto pp = static_cast<std::uint64_t>(p);
    if (!in_Xi_u64(pp, std::uint64_t(1) << n) || !in_Xi_u64(pp, (std::uint64_t(1) << n) - 1))
      return false;
  }
  const Angle beta(p, bigint(1) << n), alpha(p, (bigint(1) << n) - 1);
  if (!(beta < alpha) || alpha > half()) return false;
  return in_Xi(beta) && in_Xi(alpha);
}

// no rational with denominator <= max_den inside (beta, alpha) is in Xi
inline bool spot_check_gap(const GapInterval& g, long long max_den) {
  if (g.n <= 30) {
    const auto p = static_cast<std::uint64_t>(g.p);
    const std::uint64_t lo_den = std::uint64_t(1) << g.n, hi_den = lo_den - 1;
    for (std::uint64_t q = 2; q <= static_cast<std::uint64_t>(max_den); ++q)
      for (std::uint64_t x = p * q / lo_den + 1; x * hi_den < p * q; ++x)
        if (std::gcd(x, q) == 1 && in_Xi_u64(x, q)) return false;
    return true;
  }
  const Angle lo = g.beta(), hi = g.alpha();
  for (long long q = 2; q <= max_den; ++q) {
    const bigint first = lo.num() * q / lo.den() + 1;
    for (bigint pp = first; pp * hi.den() < hi.num() * q; ++pp) {
      const Angle x(pp, bigint(q));
      if (x.den() != q) continue;
      if (in_Xi(x)) return false;
    }
  }
  return true;
}

}  // namespace detail

inline std::vector<GapInterval> enumerate_gaps(int n_max, long long spot_den = 0) {
  if (n_max < 2 || n_max > 24) throw domain_error("enumerate_gaps needs 2 <= n_max <= 24");
  if (spot_den == 0) spot_den = std::min<long long>(1LL << std::min(n_max + 2, 10), 1024);
  std::vector<GapInterval> out;
  for (int n = 2; n <= n_max; ++n) {
    const long long limit = ((1LL << n) - 1) / 2;  // p/(2^n-1) <= 1/2
    for (long long p = 1; p <= limit; ++p) {
      if (!detail::is_gap_candidate(p, n)) continue;
      GapInterval g{p, n};
      if (!detail::spot_check_gap(g, spot_den))
        throw numerical_failure("gap candidate " + g.beta().str() + ".." + g.alpha().str() +
                                " contains an element of Xi");
      out.push_back(g);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const GapInterval& a, const GapInterval& b) { return a.beta() < b.beta(); });
  return out;
}

inline std::optional<GapInterval> gap_containing(const Angle& t) {
  if (!(t < half())) throw domain_error("gap_containing expects an angle in (0, 1/2)");
  if (in_Xi(t)) return std::nullopt;
  for (int n = 2; n <= 24; ++n) {
    const bigint p = (t.num() << n) / t.den();
    if (p == 0) continue;
    GapInterval g{p, n};
    if (g.contains(t) && detail::is_gap_candidate(p, n)) return g;
  }
  throw numerical_failure("no gap with n <= 24 brackets " + t.str());
}

// element of the boundary of Xi strictly inside (lo, hi); lo empty means 0
inline Angle boundary_Xi_between(const std::optional<Angle>& lo, const Angle& hi, int max_n = 24) {
  if (hi > half()) throw domain_error("boundary_Xi_between needs hi <= 1/2");
  if (lo && !(*lo < hi)) throw domain_error("boundary_Xi_between needs lo < hi");
  // lo and hi inside one gap: nothing to find
  if (lo && *lo < half()) {
    const Angle mid((lo->num() * hi.den() + hi.num() * lo->den()), 2 * lo->den() * hi.den());
    if (mid < half()) {
      if (auto g = gap_containing(mid); g && g->beta() <= *lo && hi <= g->alpha())
        throw domain_error("interval (" + lo->str() + ", " + hi.str() + ") lies in a gap of Xi");
    }
  }
  const bigint lo_num = lo ? lo->num() : bigint(0);
  const bigint lo_den = lo ? lo->den() : bigint(1);
  for (int n = 1; n <= max_n; ++n) {
    const bigint scale = bigint(1) << n;
    // p/2^n with lo < p/2^n < hi
    const bigint pmin = lo_num * scale / lo_den + 1;
    std::optional<Angle> best;
    bigint best_dist;
    for (bigint p = pmin; p * hi.den() < hi.num() * scale; ++p) {
      const Angle x(p, scale);
      if (x.den() != scale) continue;
      if (!in_Xi(x)) continue;
      // |x - mid| on denominator 2 * 2^n * lo_den * hi.den
      bigint dist = 2 * p * lo_den * hi.den() - scale * (lo_num * hi.den() + hi.num() * lo_den);
      if (dist < 0) dist = -dist;
      if (!best || dist < best_dist) {
        best = x;
        best_dist = dist;
      }
    }
    if (best) return *best;
  }
  throw numerical_failure("no dyadic element of Xi found below denominator 2^" +
                          std::to_string(max_n));
}

}  // namespace newton_moduli

#endif  // NEWTON_MODULI_ANGLES_HPP
