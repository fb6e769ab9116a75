#ifndef NEWTON_MODULI_CORE_HPP
#define NEWTON_MODULI_CORE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace newton_moduli {

using cplx = std::complex<double>;

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct numerical_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Point of the Riemann sphere.
class ExtComplex {
public:
  constexpr ExtComplex() = default;
  constexpr ExtComplex(cplx z) : z_(z) {}
  constexpr ExtComplex(double x) : z_(x, 0.0) {}

  static constexpr ExtComplex infinity() {
    ExtComplex p;
    p.inf_ = true;
    return p;
  }

  constexpr bool is_inf() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }

  cplx value() const {
    if (inf_) throw domain_error("point at infinity has no finite value");
    return z_;
  }

  friend bool operator==(const ExtComplex& a, const ExtComplex& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.z_ == b.z_;
  }

private:
  cplx z_{};
  bool inf_ = false;
};

inline double chordal(const ExtComplex& a, const ExtComplex& b) {
  if (a.is_inf() && b.is_inf()) return 0.0;
  if (a.is_inf()) return 2.0 / std::sqrt(1.0 + std::norm(b.value()));
  if (b.is_inf()) return 2.0 / std::sqrt(1.0 + std::norm(a.value()));
  cplx x = a.value(), y = b.value();
  return 2.0 * std::abs(x - y) / std::sqrt((1.0 + std::norm(x)) * (1.0 + std::norm(y)));
}

// Euclidean when both finite, chordal otherwise.
inline double point_distance(const ExtComplex& a, const ExtComplex& b) {
  if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value());
  return chordal(a, b);
}

class Parameter {
public:
  explicit Parameter(cplx lambda) : lambda_(lambda) {
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
      throw domain_error("lambda must be finite");
    for (double bad : {0.0, 1.5, -1.5})
      if (std::abs(lambda - cplx(bad)) < 1e-14)
        throw domain_error("lambda outside X (0 and +-3/2 are excluded)");
  }
  cplx value() const { return lambda_; }

private:
  cplx lambda_;
};

inline bool is_valid_parameter(cplx lambda) {
  try {
    Parameter p(lambda);
    return true;
  } catch (const domain_error&) {
    return false;
  }
}

// all roots of c3 z^3 + c2 z^2 + c1 z + c0, missing degree filled by infinity
inline std::array<ExtComplex, 3> cubic_roots(cplx c3, cplx c2, cplx c1, cplx c0) {
  const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0 || (std::abs(c3) <= 1e-300 * scale && std::abs(c2) <= 1e-300 * scale &&
                       std::abs(c1) <= 1e-300 * scale))
    throw domain_error("degenerate polynomial: leading coefficients vanish");

  auto p = [&](cplx z) { return ((c3 * z + c2) * z + c1) * z + c0; };
  auto dp = [&](cplx z) { return (3.0 * c3 * z + 2.0 * c2) * z + c1; };
  auto polish = [&](cplx z) {
    for (int it = 0; it < 3; ++it) {
      cplx d = dp(z);
      if (d == cplx(0)) break;
      cplx zn = z - p(z) / d;
      if (!(std::abs(p(zn)) < std::abs(p(z)))) break;
      z = zn;
    }
    return z;
  };

  std::array<ExtComplex, 3> out{ExtComplex::infinity(), ExtComplex::infinity(),
                                ExtComplex::infinity()};
  if (std::abs(c3) <= 1e-300 * scale) {
    if (std::abs(c2) <= 1e-300 * scale) {
      out[0] = polish(-c0 / c1);
      return out;
    }
    cplx disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
    cplx q = -0.5 * (c1 + (std::real(std::conj(c1) * disc) >= 0 ? disc : -disc));
    if (q == cplx(0)) {
      out[0] = cplx(0);
      out[1] = cplx(0);
    } else {
      out[0] = polish(q / c2);
      out[1] = polish(c0 / q);
    }
    return out;
  }

  const cplx a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const cplx shift = a / 3.0;
  const cplx pp = b - a * a / 3.0;
  const cplx qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cplx disc = std::sqrt(qq * qq / 4.0 + pp * pp * pp / 27.0);
  cplx s1 = -qq / 2.0 + disc, s2 = -qq / 2.0 - disc;
  cplx s = std::abs(s1) >= std::abs(s2) ? s1 : s2;
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  if (s == cplx(0)) {
    for (auto& r : out) r = polish(-shift);
    return out;
  }
  cplx u = std::pow(s, 1.0 / 3.0);
  for (int k = 0; k < 3; ++k) {
    cplx uk = u;
    for (int j = 0; j < k; ++j) uk *= omega;
    cplx t = uk - pp / (3.0 * uk);
    out[k] = polish(t - shift);
  }
  return out;
}

class NewtonMap {
public:
  explicit NewtonMap(Parameter p) : param_(p) {
    const cplx l = p.value();
    l2_ = l * l;
    a_ = l2_ - 0.25;
    d_ = l2_ + 0.75;
    roots_ = {-l - 0.5, l - 0.5, cplx(1.0)};
    for (int e = 0; e < 3; ++e) {
      const cplx b = roots_[e];
      coeff_[e] = 3.0 * b / dpoly(b);
      if (std::abs(eval(b).value() - b) > 1e-12 * (1.0 + std::abs(b)))
        throw numerical_failure("root is not fixed to 1e-12");
    }
  }
  explicit NewtonMap(cplx lambda) : NewtonMap(Parameter(lambda)) {}

  cplx lambda() const { return param_.value(); }
  const Parameter& parameter() const { return param_; }
  // eps in 1..3
  cplx root(int eps) const { return roots_.at(eps - 1); }
  cplx boettcher_coeff(int eps) const { return coeff_.at(eps - 1); }
  static constexpr cplx free_critical_point() { return cplx(0.0); }

  cplx poly(cplx z) const { return (z - roots_[0]) * (z - roots_[1]) * (z - roots_[2]); }
  cplx dpoly(cplx z) const { return 3.0 * z * z - d_; }

  ExtComplex eval(const ExtComplex& w) const {
    if (w.is_inf()) return w;
    const cplx z = w.value();
    if (std::abs(z) > 1e50) return z * (2.0 - a_ / (z * z * z)) / (3.0 - d_ / (z * z));
    const cplx den = 3.0 * z * z - d_;
    if (std::abs(den) < 1e-300) return ExtComplex::infinity();
    return (2.0 * z * z * z - a_) / den;
  }

  cplx derivative(const ExtComplex& w) const {
    if (w.is_inf()) return cplx(3.0 / 2.0);  // w = 1/z chart: leading 3z^2 over 2z^3
    const cplx z = w.value();
    const cplx den = dpoly(z);
    if (std::abs(den) < 1e-300) throw domain_error("derivative has a pole here");
    return 6.0 * z * poly(z) / (den * den);
  }

  // g with N(z) - b = g(z) (z - b)^2
  cplx offset_factor(int eps, cplx z) const {
    const cplx b = root(eps);
    return (2.0 * z + b) / dpoly(z);
  }

  std::array<ExtComplex, 3> preimages(const ExtComplex& w) const {
    if (w.is_inf()) {
      const cplx r = std::sqrt((3.0 + 4.0 * l2_) / 12.0);
      return {ExtComplex::infinity(), ExtComplex(r), ExtComplex(-r)};
    }
    const cplx v = w.value();
    return cubic_roots(2.0, -3.0 * v, 0.0, d_ * v - a_);
  }

private:
  Parameter param_;
  cplx l2_, a_, d_;
  std::array<cplx, 3> roots_{};
  std::array<cplx, 3> coeff_{};
};

class MoebiusMap {
public:
  MoebiusMap(cplx a, cplx b, cplx c, cplx d) : a_(a), b_(b), c_(c), d_(d) {
    if (std::abs(det()) < 1e-300) throw domain_error("singular Moebius map");
  }
  static MoebiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }

  cplx det() const { return a_ * d_ - b_ * c_; }
  cplx a() const { return a_; }
  cplx b() const { return b_; }
  cplx c() const { return c_; }
  cplx d() const { return d_; }

  ExtComplex operator()(const ExtComplex& w) const {
    if (w.is_inf()) {
      if (c_ == cplx(0)) return ExtComplex::infinity();
      return a_ / c_;
    }
    const cplx z = w.value();
    const cplx den = c_ * z + d_;
    if (std::abs(den) < 1e-300 * std::max(1.0, std::abs(a_ * z + b_))) return ExtComplex::infinity();
    return (a_ * z + b_) / den;
  }

  // (*this)(other(z))
  MoebiusMap compose(const MoebiusMap& o) const {
    return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_,
            c_ * o.b_ + d_ * o.d_};
  }
  MoebiusMap inverse() const { return {d_, -b_, -c_, a_}; }

  // same action on the sphere
  bool same_action(const MoebiusMap& o, double tol = 1e-10) const {
    const cplx s1 = std::sqrt(det()), s2 = std::sqrt(o.det());
    const std::array<cplx, 4> m{a_ / s1, b_ / s1, c_ / s1, d_ / s1};
    const std::array<cplx, 4> n{o.a_ / s2, o.b_ / s2, o.c_ / s2, o.d_ / s2};
    double plus = 0, minus = 0;
    for (int i = 0; i < 4; ++i) {
      plus = std::max(plus, std::abs(m[i] - n[i]));
      minus = std::max(minus, std::abs(m[i] + n[i]));
    }
    return std::min(plus, minus) < tol;
  }

private:
  cplx a_, b_, c_, d_;
};

// ((z4-z1)/(z4-z3)) * ((z2-z3)/(z2-z1))
inline ExtComplex cross_ratio(const ExtComplex& z1, const ExtComplex& z2, const ExtComplex& z3,
                              const ExtComplex& z4) {
  const std::array<ExtComplex, 4> pts{z1, z2, z3, z4};
  int coincidences = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (chordal(pts[i], pts[j]) < 1e-15) ++coincidences;
  if (coincidences > 1) throw domain_error("cross ratio needs three distinct points");

  auto diff = [](const ExtComplex& p, const ExtComplex& q) -> ExtComplex {
    if (p.is_inf() || q.is_inf()) return ExtComplex::infinity();
    return p.value() - q.value();
  };
  // each of the four factors; infinite factors cancel in pairs
  std::array<ExtComplex, 2> num{diff(z4, z1), diff(z2, z3)};
  std::array<ExtComplex, 2> den{diff(z4, z3), diff(z2, z1)};
  cplx n = 1.0, d = 1.0;
  int ninf = 0, dinf = 0;
  for (auto& f : num) {
    if (f.is_inf()) ++ninf;
    else n *= f.value();
  }
  for (auto& f : den) {
    if (f.is_inf()) ++dinf;
    else d *= f.value();
  }
  if (ninf > dinf) return ExtComplex::infinity();
  if (dinf > ninf) return cplx(0.0);
  if (d == cplx(0)) return ExtComplex::infinity();
  return n / d;
}

inline std::string format_complex(cplx z, int precision = 17) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*g%+.*gi", precision, z.real(), precision, z.imag());
  return buf;
}

inline std::string format_point(const ExtComplex& p, int precision = 17) {
  return p.is_inf() ? std::string("inf") : format_complex(p.value(), precision);
}

}  // namespace newton_moduli

#endif  // NEWTON_MODULI_CORE_HPP
