#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "newton_moduli/angles.hpp"

using namespace newton_moduli;

namespace {

// direct orbit walk over 2q doubling steps, residues in (0, 1]
bool brute_in_xi(long long p, long long q) {
  if (2 * p > q) return false;
  long long x = p;
  for (long long k = 0; k <= 2 * q; ++k) {
    if (x < p) return false;
    x = (2 * x) % q;
    if (x == 0) x = q;
  }
  return true;
}

struct Frac {
  long long p, q;
  double v() const { return double(p) / double(q); }
};

std::vector<Frac> brute_scan(long long max_den) {
  std::vector<Frac> out;
  for (long long q = 2; q <= max_den; ++q)
    for (long long p = 1; 2 * p <= q; ++p)
      if (std::gcd(p, q) == 1) out.push_back({p, q});
  return out;
}

}  // namespace

TEST(Angle, NormalisationAndParsing) {
  EXPECT_EQ(Angle::parse("2/4"), Angle(1, 2));
  EXPECT_EQ(Angle::parse("0/5"), Angle(1, 1));
  EXPECT_EQ(Angle::parse("7/5"), Angle(2, 5));
  EXPECT_EQ(Angle(3, 8).str(), "3/8");
  EXPECT_THROW(Angle::parse("1/0"), domain_error);
  EXPECT_THROW(Angle::parse("x/3"), domain_error);
  EXPECT_EQ(Angle(1, 1).to_unit_interval(), 0.0);
  EXPECT_EQ(double_angle(Angle(3, 8)), Angle(3, 4));
  EXPECT_EQ(reflect(Angle(1, 4)), Angle(3, 4));
}

TEST(Xi, KnownMembers) {
  for (const char* s : {"1/2", "1/4", "1/8", "1/3", "3/7", "3/8", "7/16", "1/5"}) EXPECT_TRUE(in_Xi(Angle::parse(s))) << s;
  for (const char* s : {"5/16", "2/7", "2/5"}) EXPECT_FALSE(in_Xi(Angle::parse(s))) << s;
  EXPECT_THROW(in_Xi(Angle(2, 3)), domain_error);
}

TEST(Xi, AgreesWithBruteForce) {
  for (const auto& f : brute_scan(300)) EXPECT_EQ(in_Xi(Angle(f.p, f.q)), brute_in_xi(f.p, f.q)) << f.p << "/" << f.q;
}

TEST(Xi, LargeDenominatorsUseExactArithmetic) {
  const bigint big = bigint(1) << 100;
  EXPECT_TRUE(in_Xi(Angle(bigint(1), big)));
  EXPECT_FALSE(in_Xi(Angle(5 * (big / 16), big)));
}

TEST(AngleClass, Shapes) {
  EXPECT_EQ(classify_angle(Angle(1, 3)), AngleClass::Periodic);
  EXPECT_EQ(classify_angle(Angle(3, 8)), AngleClass::Dyadic);
  EXPECT_EQ(classify_angle(Angle(1, 6)), AngleClass::StrictlyPreperiodic);
  EXPECT_EQ(orbit_shape(Angle(1, 6)).preperiod, 1);
  EXPECT_EQ(orbit_shape(Angle(1, 6)).period, 2);
  EXPECT_EQ(orbit_shape(Angle(1, 7)).period, 3);
  EXPECT_EQ(orbit_shape(Angle(3, 8)).preperiod, 3);
}

TEST(CAlpha, OrbitAboveAlpha) {
  EXPECT_TRUE(in_C_alpha(Angle(1, 2), Angle(1, 4)));
  EXPECT_FALSE(in_C_alpha(Angle(1, 8), Angle(1, 4)));
  EXPECT_TRUE(in_C_alpha(Angle(2, 3), Angle(1, 3)));
  EXPECT_THROW(in_C_alpha(Angle(1, 2), Angle(5, 16)), domain_error);
}

TEST(Gaps, LevelSixList) {
  const auto gaps = enumerate_gaps(6);
  ASSERT_EQ(gaps.size(), 21u);
  bool quarter = false;
  for (const auto& g : gaps) quarter |= g.beta() == Angle(1, 4) && g.alpha() == Angle(1, 3);
  EXPECT_TRUE(quarter);
  for (std::size_t i = 1; i < gaps.size(); ++i) EXPECT_LE(gaps[i - 1].alpha(), gaps[i].beta());
}

TEST(Gaps, AgreeWithBruteForceScan) {
  const auto scan = brute_scan(256);
  std::vector<Frac> members;
  for (const auto& f : scan)
    if (brute_in_xi(f.p, f.q)) members.push_back(f);
  std::sort(members.begin(), members.end(), [](const Frac& a, const Frac& b) { return a.p * b.q < b.p * a.q; });
  const auto gaps = enumerate_gaps(6);
  std::set<std::pair<std::string, std::string>> listed;
  for (const auto& g : gaps) listed.insert({g.beta().str(), g.alpha().str()});
  // every listed gap is empty and bounded by members
  for (const auto& g : gaps) {
    const double b = g.beta().to_double(), a = g.alpha().to_double();
    for (const auto& m : members) EXPECT_FALSE(m.v() > b + 1e-15 && m.v() < a - 1e-15) << g.beta().str();
    EXPECT_TRUE(brute_in_xi(static_cast<long long>(g.beta().num()), static_cast<long long>(g.beta().den())));
    EXPECT_TRUE(brute_in_xi(static_cast<long long>(g.alpha().num()), static_cast<long long>(g.alpha().den())));
  }
  // every level <= 6 candidate the scan certifies is listed
  for (int n = 2; n <= 6; ++n)
    for (long long p = 1; 2 * p <= (1LL << n) - 1; ++p) {
      const long long qb = 1LL << n, qa = qb - 1;
      const long long gb = std::gcd(p, qb), ga = std::gcd(p, qa);
      if (!brute_in_xi(p / gb, qb / gb) || !brute_in_xi(p / ga, qa / ga)) continue;
      bool empty = true;
      for (const auto& m : members)
        if (m.v() > double(p) / qb + 1e-15 && m.v() < double(p) / qa - 1e-15) empty = false;
      if (empty) {
        EXPECT_TRUE(listed.count({Angle(p, qb).str(), Angle(p, qa).str()})) << p << "/" << qb;
      }
    }
}

TEST(Gaps, Containing) {
  const auto g = gap_containing(Angle(2, 7));
  ASSERT_TRUE(g);
  EXPECT_EQ(g->beta(), Angle(1, 4));
  EXPECT_EQ(g->alpha(), Angle(1, 3));
  EXPECT_EQ(gap_containing(Angle(5, 16))->beta(), Angle(1, 4));
  EXPECT_FALSE(gap_containing(Angle(1, 4)));
}

TEST(Gaps, DeeperLevelsAreConsistent) {
  const auto g10 = enumerate_gaps(10);
  for (const auto& g : g10) {
    EXPECT_TRUE(in_Xi(g.beta()));
    EXPECT_TRUE(in_Xi(g.alpha()));
  }
  EXPECT_THROW(enumerate_gaps(25), domain_error);
}

TEST(BoundaryXi, Bisection) {
  EXPECT_EQ(boundary_Xi_between(Angle(1, 8), Angle(1, 2)), Angle(1, 4));
  EXPECT_EQ(boundary_Xi_between(Angle(1, 4), Angle(1, 2)), Angle(3, 8));
  EXPECT_EQ(boundary_Xi_between(std::nullopt, Angle(1, 2)), Angle(1, 4));
  EXPECT_THROW(boundary_Xi_between(Angle(1, 4), Angle(1, 3)), domain_error);
  const Angle m = boundary_Xi_between(Angle(3, 7), Angle(1, 2));
  EXPECT_TRUE(in_Xi(m));
  EXPECT_TRUE(Angle(3, 7) < m && m < Angle(1, 2));
}
