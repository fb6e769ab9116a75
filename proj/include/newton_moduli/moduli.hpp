#ifndef NEWTON_MODULI_MODULI_HPP
#define NEWTON_MODULI_MODULI_HPP

#include <array>
#include <string>
#include <vector>

#include "core.hpp"

namespace newton_moduli {

struct SymmetryGroup {
  std::array<MoebiusMap, 6> elements;
  std::array<std::string, 6> names;
  // table[i][j] = index of elements[i] o elements[j]
  std::array<std::array<int, 6>, 6> table;
};

inline MoebiusMap gamma1() { return {0.5, 0.75, 1.0, -0.5}; }
inline MoebiusMap gamma2() { return {-0.5, 0.75, 1.0, 0.5}; }

inline const SymmetryGroup& group_elements() {
  static const SymmetryGroup group = [] {
    const MoebiusMap g1 = gamma1(), g2 = gamma2();
    SymmetryGroup s{{MoebiusMap::identity(), g1, g2, g1.compose(g2), g2.compose(g1),
                     g2.inverse().compose(g1).compose(g2)},
                    {"id", "g1", "g2", "g1*g2", "g2*g1", "g2^-1*g1*g2"},
                    {}};
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const MoebiusMap prod = s.elements[i].compose(s.elements[j]);
        s.table[i][j] = -1;
        for (int k = 0; k < 6; ++k)
          if (prod.same_action(s.elements[k])) s.table[i][j] = k;
        if (s.table[i][j] < 0) throw numerical_failure("symmetry group is not closed");
      }
    return s;
  }();
  return group;
}

// index of the element acting as lambda -> -lambda
inline int negation_element() {
  const MoebiusMap neg{-1.0, 0.0, 0.0, 1.0};
  const auto& g = group_elements();
  for (int i = 0; i < 6; ++i)
    if (g.elements[i].same_action(neg)) return i;
  return -1;
}

struct OrbitEntry {
  cplx value;
  int element;
};

struct ParameterOrbit {
  std::vector<OrbitEntry> entries;
  bool dropped_degenerate = false;
};

inline ParameterOrbit parameter_orbit(const Parameter& lambda) {
  ParameterOrbit out;
  const auto& g = group_elements();
  for (int i = 0; i < 6; ++i) {
    const ExtComplex img = g.elements[i](lambda.value());
    if (img.is_inf() || !is_valid_parameter(img.value())) {
      out.dropped_degenerate = true;
      continue;
    }
    bool dup = false;
    for (const auto& e : out.entries)
      if (std::abs(e.value - img.value()) < 1e-10) dup = true;
    if (!dup) out.entries.push_back({img.value(), i});
  }
  return out;
}

// number of group elements fixing lambda: 1 generic, 2 or 3 at orbifold points
inline int stabilizer_order(cplx lambda, double tol = 1e-10) {
  int n = 0;
  for (const auto& m : group_elements().elements)
    if (chordal(m(lambda), lambda) < tol) ++n;
  return n;
}

inline bool are_conjugate(const Parameter& l1, const Parameter& l2) {
  for (const auto& e : parameter_orbit(l2).entries)
    if (std::abs(e.value - l1.value()) < 1e-8) return true;
  return false;
}

// sigma[e-1] = basin index of N_{g(lambda)} matching basin e of N_lambda
struct BasinPermutation {
  std::array<int, 3> sigma;
  cplx scale;
  double residual;
};

// the conjugacy fixes infinity and 0, so it is z -> k z
inline BasinPermutation basin_permutation(cplx lambda, cplx image) {
  const NewtonMap f(lambda), h(image);
  static const std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  BasinPermutation best{{1, 2, 3}, 1.0, 1e300};
  for (const auto& p : perms) {
    cplx num = 0;
    double den = 0;
    for (int e = 0; e < 3; ++e) {
      num += std::conj(f.root(e + 1)) * h.root(p[e] + 1);
      den += std::norm(f.root(e + 1));
    }
    const cplx k = num / den;
    double res = 0;
    for (int e = 0; e < 3; ++e) res = std::max(res, std::abs(k * f.root(e + 1) - h.root(p[e] + 1)));
    if (res < best.residual) best = {{p[0] + 1, p[1] + 1, p[2] + 1}, k, res};
  }
  return best;
}

enum class DomainPiece { Omega, SegmentRay, ArcRay, ExceptionalPoint };

inline const char* to_string(DomainPiece p) {
  switch (p) {
    case DomainPiece::Omega: return "Omega";
    case DomainPiece::SegmentRay: return "R(0)";
    case DomainPiece::ArcRay: return "R(1/2)";
    case DomainPiece::ExceptionalPoint: return "exceptional";
  }
  return "?";
}

struct ReducedParameter {
  cplx value;
  int element;  // group element mapping the input to value
  DomainPiece piece;
  int stabilizer;
};

struct reduction_error : domain_error {
  reduction_error(const std::string& msg, std::vector<OrbitEntry> orbit)
      : domain_error(msg), orbit(std::move(orbit)) {}
  std::vector<OrbitEntry> orbit;
};

namespace detail {

inline bool in_piece(cplx l, DomainPiece piece, double tol) {
  const cplx sqrt3i_2(0.0, std::sqrt(3.0) / 2.0);
  switch (piece) {
    case DomainPiece::Omega:
      return std::abs(l - 0.5) < 1.0 - tol && std::abs(l + 0.5) < 1.0 - tol && l.imag() > tol;
    case DomainPiece::SegmentRay:
      return std::abs(l.imag()) <= tol && l.real() > -0.5 + tol && l.real() < -tol;
    case DomainPiece::ArcRay:
      return std::abs(std::abs(l - 0.5) - 1.0) <= tol && l.imag() > tol && l.real() > -0.5 + tol &&
             l.real() < -tol;
    case DomainPiece::ExceptionalPoint:
      return std::abs(l - sqrt3i_2) <= tol || std::abs(l + 0.5) <= tol;
  }
  return false;
}

}  // namespace detail

inline ReducedParameter reduce_to_fundamental_domain(const Parameter& lambda, double tol = 1e-10) {
  const auto& g = group_elements();
  std::vector<OrbitEntry> orbit;
  for (int i = 0; i < 6; ++i) {
    const ExtComplex img = g.elements[i](lambda.value());
    if (img.is_finite()) orbit.push_back({img.value(), i});
  }
  for (DomainPiece piece : {DomainPiece::Omega, DomainPiece::SegmentRay, DomainPiece::ArcRay,
                            DomainPiece::ExceptionalPoint})
    for (const auto& e : orbit)
      if (detail::in_piece(e.value, piece, tol))
        return {e.value, e.element, piece, stabilizer_order(e.value)};
  throw reduction_error("no orbit element lies in the fundamental domain within tolerance", orbit);
}

}  // namespace newton_moduli

#endif  // NEWTON_MODULI_MODULI_HPP
