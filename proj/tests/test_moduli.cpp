#include <gtest/gtest.h>

#include <random>
#include <set>

#include "newton_moduli/moduli.hpp"

using namespace newton_moduli;

namespace {

std::vector<cplx> random_parameters(int n, unsigned seed, double box = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<cplx> out;
  while (int(out.size()) < n) {
    const cplx l(u(rng), u(rng));
    if (is_valid_parameter(l)) out.push_back(l);
  }
  return out;
}

}  // namespace

TEST(Group, SixDistinctElementsClosedUnderComposition) {
  const auto& g = group_elements();
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) EXPECT_FALSE(g.elements[i].same_action(g.elements[j]));
  const std::vector<cplx> probes{cplx(0.3, 0.2), cplx(-1.1, 0.7), cplx(2.0, -0.4)};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const int k = g.table[i][j];
      ASSERT_GE(k, 0);
      for (cplx z : probes) {
        const auto lhs = g.elements[i](g.elements[j](z));
        EXPECT_LT(chordal(lhs, g.elements[k](z)), 1e-10);
      }
    }
  // identity row and column, and a unique inverse per row
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(g.table[0][i], i);
    EXPECT_EQ(g.table[i][0], i);
    EXPECT_EQ(std::count(g.table[i].begin(), g.table[i].end(), 0), 1);
  }
}

TEST(Group, PermutesDegenerateParameters) {
  const std::vector<ExtComplex> special{ExtComplex(0.5), ExtComplex(-0.5), ExtComplex::infinity()};
  for (const auto& m : group_elements().elements) {
    std::set<int> hit;
    for (const auto& p : special) {
      const auto img = m(p);
      for (int k = 0; k < 3; ++k)
        if (chordal(img, special[k]) < 1e-12) hit.insert(k);
    }
    EXPECT_EQ(hit.size(), 3u);
  }
}

TEST(Group, NegationElement) {
  const int n = negation_element();
  ASSERT_EQ(n, 5);
  for (cplx l : random_parameters(10, 3))
    EXPECT_LT(std::abs(group_elements().elements[n](l).value() + l), 1e-12);
}

TEST(Group, ConjugacyIsLinearScaling) {
  const auto& g = group_elements();
  for (cplx l : random_parameters(30, 4)) {
    for (int i = 0; i < 6; ++i) {
      const auto img = g.elements[i](l);
      if (img.is_inf() || !is_valid_parameter(img.value())) continue;
      const auto bp = basin_permutation(l, img.value());
      EXPECT_LT(bp.residual, 1e-9);
      // z -> kz must conjugate the maps
      const NewtonMap f(l), h(img.value());
      const cplx z(0.21, -0.47);
      EXPECT_LT(std::abs(h.eval(bp.scale * z).value() - bp.scale * f.eval(z).value()), 1e-9 * (1 + std::abs(bp.scale)));
    }
  }
}

TEST(Group, BasinPermutationsPerElement) {
  const auto& g = group_elements();
  const cplx l(0.31, 0.42);
  const std::array<std::array<int, 3>, 6> expected{
      {{1, 2, 3}, {1, 3, 2}, {3, 2, 1}, {2, 3, 1}, {3, 1, 2}, {2, 1, 3}}};
  for (int i = 0; i < 6; ++i) EXPECT_EQ(basin_permutation(l, g.elements[i](l).value()).sigma, expected[i]) << g.names[i];
}

TEST(Orbit, SizeAndConjugacy) {
  const Parameter p(cplx(0.3, 0.4));
  const auto orb = parameter_orbit(p);
  EXPECT_EQ(orb.entries.size(), 6u);
  for (const auto& e : orb.entries) EXPECT_TRUE(are_conjugate(p, Parameter(e.value)));
  EXPECT_FALSE(are_conjugate(p, Parameter(cplx(0.3, 0.41))));
  EXPECT_EQ(parameter_orbit(Parameter(cplx(0, std::sqrt(3.0) / 2))).entries.size(), 2u);
}

TEST(Stabilizer, OrbifoldPoints) {
  EXPECT_EQ(stabilizer_order(cplx(0, std::sqrt(3.0) / 2)), 3);
  EXPECT_EQ(stabilizer_order(cplx(0, -std::sqrt(3.0) / 2)), 3);
  EXPECT_EQ(stabilizer_order(cplx(-0.5)), 2);
  EXPECT_EQ(stabilizer_order(cplx(0.3, 0.4)), 1);
}

TEST(Reduce, EveryRandomParameterReduces) {
  int failures = 0;
  for (cplx l : random_parameters(20000, 5)) {
    try {
      const auto r = reduce_to_fundamental_domain(Parameter(l));
      EXPECT_TRUE(are_conjugate(Parameter(l), Parameter(r.value)));
    } catch (const reduction_error&) {
      ++failures;
    }
  }
  EXPECT_EQ(failures, 0);
}

TEST(Reduce, OrbitInvariant) {
  const auto& g = group_elements();
  for (cplx l : random_parameters(200, 6)) {
    const auto base = reduce_to_fundamental_domain(Parameter(l));
    for (const auto& m : g.elements) {
      const auto img = m(l);
      if (img.is_inf() || !is_valid_parameter(img.value())) continue;
      const auto r = reduce_to_fundamental_domain(Parameter(img.value()));
      EXPECT_LT(std::abs(r.value - base.value), 1e-9);
      EXPECT_EQ(r.piece, base.piece);
    }
  }
}

TEST(Reduce, BoundaryPieces) {
  EXPECT_EQ(reduce_to_fundamental_domain(Parameter(cplx(-0.25))).piece, DomainPiece::SegmentRay);
  EXPECT_EQ(reduce_to_fundamental_domain(Parameter(0.5 + std::polar(1.0, 2.5))).piece, DomainPiece::ArcRay);
  const auto ex = reduce_to_fundamental_domain(Parameter(cplx(0, std::sqrt(3.0) / 2)));
  EXPECT_EQ(ex.piece, DomainPiece::ExceptionalPoint);
  EXPECT_EQ(ex.stabilizer, 3);
  EXPECT_EQ(reduce_to_fundamental_domain(Parameter(cplx(0.05, 0.4))).piece, DomainPiece::Omega);
}
