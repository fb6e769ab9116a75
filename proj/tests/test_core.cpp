#include <gtest/gtest.h>

#include <random>

#include "newton_moduli/core.hpp"
#include "newton_moduli/parse.hpp"

using namespace newton_moduli;

namespace {

std::vector<cplx> random_parameters(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<cplx> out;
  while (int(out.size()) < n) {
    const cplx l(u(rng), u(rng));
    if (is_valid_parameter(l)) out.push_back(l);
  }
  return out;
}

}  // namespace

TEST(Parameter, RejectsExcludedValues) {
  EXPECT_THROW(Parameter(0.0), domain_error);
  EXPECT_THROW(Parameter(1.5), domain_error);
  EXPECT_THROW(Parameter(cplx(-1.5, 1e-16)), domain_error);
  EXPECT_THROW(Parameter(cplx(NAN, 0)), domain_error);
  EXPECT_NO_THROW(Parameter(cplx(0.0, 1e-6)));
}

TEST(ExtComplex, InfinityHandling) {
  const auto inf = ExtComplex::infinity();
  EXPECT_TRUE(inf.is_inf());
  EXPECT_THROW(inf.value(), domain_error);
  EXPECT_EQ(inf, ExtComplex::infinity());
  EXPECT_NEAR(chordal(inf, ExtComplex(1e8)), 2e-8, 1e-12);
  EXPECT_NEAR(chordal(ExtComplex(0.0), ExtComplex(1.0)), std::sqrt(2.0), 1e-15);
}

TEST(CubicRoots, ResidualAndVieta) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 2000; ++trial) {
    const cplx c3(g(rng), g(rng)), c2(g(rng), g(rng)), c1(g(rng), g(rng)), c0(g(rng), g(rng));
    const auto r = cubic_roots(c3, c2, c1, c0);
    cplx sum = 0, prod = 1;
    for (const auto& z : r) {
      ASSERT_TRUE(z.is_finite());
      const cplx v = z.value();
      const double scale = std::abs(c3) * std::pow(std::abs(v), 3) + std::abs(c2) * std::norm(v) +
                           std::abs(c1) * std::abs(v) + std::abs(c0);
      EXPECT_LT(std::abs(((c3 * v + c2) * v + c1) * v + c0), 1e-12 * scale);
      sum += v;
      prod *= v;
    }
    EXPECT_LT(std::abs(sum + c2 / c3), 1e-9 * (1 + std::abs(c2 / c3)));
    EXPECT_LT(std::abs(prod + c0 / c3), 1e-9 * (1 + std::abs(c0 / c3)));
  }
}

TEST(CubicRoots, TripleAndDegenerate) {
  const auto r = cubic_roots(1.0, -3.0, 3.0, -1.0);
  for (const auto& z : r) EXPECT_LT(std::abs(z.value() - 1.0), 1e-5);
  const auto q = cubic_roots(0.0, 1.0, 0.0, -4.0);
  EXPECT_TRUE(q[2].is_inf());
  EXPECT_NEAR(std::abs(q[0].value() * q[1].value()), 4.0, 1e-12);
  EXPECT_THROW(cubic_roots(0.0, 0.0, 0.0, 1.0), domain_error);
}

TEST(NewtonMap, RootsAreSuperattractingFixedPoints) {
  for (cplx l : random_parameters(50, 1)) {
    const NewtonMap f(l);
    for (int e = 1; e <= 3; ++e) {
      const cplx b = f.root(e);
      EXPECT_LT(std::abs(f.eval(b).value() - b), 1e-12 * (1 + std::abs(b)));
      EXPECT_LT(std::abs(f.derivative(b)), 1e-12);
      EXPECT_LT(std::abs(f.poly(b)), 1e-12);
    }
  }
}

TEST(NewtonMap, EvalMatchesNewtonStepOfPolynomial) {
  for (cplx l : random_parameters(50, 2)) {
    const NewtonMap f(l);
    const cplx z(0.37, -0.81);
    const cplx p = f.poly(z);
    const cplx dp = (f.poly(z + 1e-6) - f.poly(z - 1e-6)) / 2e-6;
    EXPECT_LT(std::abs(f.eval(z).value() - (z - p / dp)), 1e-7);
  }
}

TEST(NewtonMap, MultiplierAtInfinityByConjugation) {
  for (cplx l : random_parameters(30, 3)) {
    const NewtonMap f(l);
    // chart w = 1/z, finite difference at w = 0
    const double h = 1e-6;
    const cplx w1 = 1.0 / f.eval(1.0 / h).value(), w2 = 1.0 / f.eval(-1.0 / h).value();
    EXPECT_NEAR(std::abs((w1 - w2) / (2 * h) - 1.5), 0.0, 1e-6);
    EXPECT_EQ(f.derivative(ExtComplex::infinity()), cplx(1.5));
  }
}

TEST(NewtonMap, OffsetFactorIdentity) {
  const NewtonMap f(cplx(0.2, 0.7));
  for (int e = 1; e <= 3; ++e) {
    const cplx b = f.root(e), z(0.1, 0.3);
    EXPECT_LT(std::abs((f.eval(z).value() - b) - f.offset_factor(e, z) * (z - b) * (z - b)), 1e-13);
    EXPECT_LT(std::abs(f.offset_factor(e, b) - f.boettcher_coeff(e)), 1e-13);
  }
}

TEST(NewtonMap, PreimagesOfInfinity) {
  for (cplx l : random_parameters(20, 4)) {
    const NewtonMap f(l);
    const auto pre = f.preimages(ExtComplex::infinity());
    const cplx r = std::sqrt((3.0 + 4.0 * l * l) / 12.0);
    EXPECT_TRUE(pre[0].is_inf());
    EXPECT_LT(std::min(std::abs(pre[1].value() - r), std::abs(pre[1].value() + r)), 1e-10);
    EXPECT_LT(std::abs(pre[1].value() + pre[2].value()), 1e-12);
    EXPECT_TRUE(f.eval(pre[1]).is_inf() || std::abs(f.eval(pre[1]).value()) > 1e10);
  }
}

TEST(NewtonMap, FinitePreimagesMapBack) {
  for (cplx l : random_parameters(20, 5)) {
    const NewtonMap f(l);
    const cplx w(-0.3, 0.45);
    for (const auto& z : f.preimages(w)) EXPECT_LT(std::abs(f.eval(z).value() - w), 1e-11);
  }
}

TEST(Moebius, ComposeInverseCrossRatio) {
  const MoebiusMap m{cplx(1, 2), 0.5, cplx(0, 1), 3.0};
  const auto id = m.compose(m.inverse());
  EXPECT_TRUE(id.same_action(MoebiusMap::identity()));
  const cplx z1(0.3), z2(1, 1), z3(-2, 0.5), z4(0.1, -0.7);
  const auto before = cross_ratio(z1, z2, z3, z4);
  const auto after = cross_ratio(m(z1), m(z2), m(z3), m(z4));
  EXPECT_LT(std::abs(before.value() - after.value()), 1e-12);
  const auto with_inf = cross_ratio(ExtComplex::infinity(), z2, z3, z4);
  EXPECT_LT(std::abs(with_inf.value() - (z2 - z3) / (z4 - z3)), 1e-14);
  EXPECT_THROW(cross_ratio(z1, z1, z1, z4), domain_error);
  EXPECT_THROW(MoebiusMap(1.0, 2.0, 2.0, 4.0), domain_error);
}

TEST(Parse, ComplexSyntax) {
  EXPECT_EQ(parse_complex("0.05+0.4i"), cplx(0.05, 0.4));
  EXPECT_EQ(parse_complex("-0.25"), cplx(-0.25, 0));
  EXPECT_EQ(parse_complex("0.1i"), cplx(0, 0.1));
  EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
  EXPECT_EQ(parse_complex("1e-3-2.5e-1i"), cplx(1e-3, -0.25));
  EXPECT_EQ(parse_complex(" 1 - 2i "), cplx(1, -2));
  EXPECT_THROW(parse_complex("abc"), domain_error);
  EXPECT_THROW(parse_complex("1+2"), domain_error);
  EXPECT_THROW(parse_complex(""), domain_error);
}
