#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "newton_moduli/render.hpp"

using namespace newton_moduli;

namespace {

RenderSpec lens_spec(int size) {
  RenderSpec s;
  s.lower_left = {-0.5, 0.0};
  s.upper_right = {0.5, 0.87};
  s.width = s.height = size;
  return s;
}

std::set<int> typeA_basins(const RenderResult& r) {
  std::set<int> out;
  for (const auto& p : r.labels)
    if (p.variant == Variant::TypeA) out.insert(p.basin);
  return out;
}

}  // namespace

TEST(RenderSpec, Validation) {
  RenderSpec s = lens_spec(64);
  s.width = 8;
  EXPECT_THROW(render_parameter_plane(s), domain_error);
  s = lens_spec(64);
  s.upper_right = s.lower_left;
  EXPECT_THROW(render_parameter_plane(s), domain_error);
  s = lens_spec(64);
  s.width = s.height = 16384;
  EXPECT_THROW(render_parameter_plane(s), domain_error);
  s = lens_spec(64);
  s.plane = PlaneKind::Dynamical;
  EXPECT_THROW(render_dynamical_plane(s), domain_error);  // lambda 0 is excluded
  EXPECT_THROW(render_parameter_plane(s), domain_error);
}

TEST(RenderParameter, LensShowsBothBasins) {
  const auto r = render_parameter_plane(lens_spec(64));
  std::size_t n1 = 0, n2 = 0;
  for (const auto& p : r.labels) {
    n1 += p.variant == Variant::TypeA && p.basin == 1;
    n2 += p.variant == Variant::TypeA && p.basin == 2;
  }
  EXPECT_GT(n1, 50u);
  EXPECT_GT(n2, 50u);
}

TEST(RenderParameter, BoundaryIntersections) {
  RenderSpec s;
  s.width = s.height = 32;
  s.lower_left = {-0.05, -0.05};
  s.upper_right = {0.05, 0.05};
  const auto at0 = typeA_basins(render_parameter_plane(s));
  EXPECT_TRUE(at0.count(1) && at0.count(2));
  for (double sign : {1.0, -1.0}) {
    const cplx c(0, sign * std::sqrt(3.0) / 2);
    s.lower_left = c - cplx(0.05, 0.05);
    s.upper_right = c + cplx(0.05, 0.05);
    EXPECT_EQ(typeA_basins(render_parameter_plane(s)).size(), 3u) << c;
  }
}

TEST(RenderParameter, PixelsAgreeWithClassify) {
  const RenderSpec s = lens_spec(32);
  const auto r = render_parameter_plane(s);
  for (int y = 0; y < s.height; y += 5)
    for (int x = 0; x < s.width; x += 3) {
      const auto c = classify(Parameter(pixel_coordinate(s, x, y)));
      EXPECT_EQ(r.label(x, y).variant, c.variant);
      EXPECT_EQ(r.label(x, y).basin, c.basin);
      EXPECT_EQ(r.image.at(x, y), palette::parameter_color(r.label(x, y)));
    }
}

TEST(RenderParameter, DeterministicAcrossThreadCounts) {
  RenderSpec s = lens_spec(48);
  s.threads = 1;
  const auto a = render_parameter_plane(s);
  s.threads = 4;
  const auto b = render_parameter_plane(s);
  EXPECT_EQ(encode_ppm(a.image), encode_ppm(b.image));
}

TEST(RenderDynamical, BasinsAndOverlays) {
  RenderSpec s;
  s.plane = PlaneKind::Dynamical;
  s.lambda = {0.05, 0.4};
  s.lower_left = {-2, -2};
  s.upper_right = {2, 2};
  s.width = s.height = 96;
  for (int e = 1; e <= 3; ++e) s.rays.push_back({e, Angle(1, 1)});
  s.marks.push_back(0.0);
  const auto r = render_dynamical_plane(s);
  EXPECT_TRUE(r.warnings.empty());
  std::set<int> seen;
  for (const auto& p : r.labels) seen.insert(p.basin);
  EXPECT_TRUE(seen.count(1) && seen.count(2) && seen.count(3));
  ASSERT_EQ(r.overlays.size(), 3u);
  for (const auto& ov : r.overlays) {
    ASSERT_FALSE(ov.pixels.empty());
    const auto last = ov.pixels.back();
    const bool on_edge = last[0] == 0 || last[1] == 0 || last[0] == s.width - 1 || last[1] == s.height - 1;
    EXPECT_TRUE(on_edge) << "basin " << ov.ray.basin;
    EXPECT_EQ(r.image.at(last[0], last[1]), palette::ray);
  }
  // root pixels carry their basin hue
  for (int e = 1; e <= 3; ++e) {
    const auto px = pixel_of(s, NewtonMap(s.lambda).root(e));
    ASSERT_TRUE(px);
    EXPECT_EQ(r.label((*px)[0], (*px)[1]).basin, e);
  }
}

TEST(RenderDynamical, FailedOverlayIsSkippedWithWarning) {
  RenderSpec s;
  s.plane = PlaneKind::Dynamical;
  s.lambda = {0, std::sqrt(3.0) / 2};
  s.width = s.height = 32;
  s.rays.push_back({4, Angle(1, 2)});
  const auto r = render_dynamical_plane(s);
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_TRUE(r.overlays.empty());
}

TEST(Ppm, HeaderAndSize) {
  Image img(16, 17);
  img.set(1, 2, {1, 2, 3});
  const std::string data = encode_ppm(img);
  EXPECT_EQ(data.rfind("P6\n16 17\n255\n", 0), 0u);
  EXPECT_EQ(data.size(), std::string("P6\n16 17\n255\n").size() + 16 * 17 * 3);
  const auto path = std::filesystem::temp_directory_path() / "newton_moduli_test.ppm";
  write_ppm(img, path.string());
  std::ifstream is(path, std::ios::binary);
  const std::string back((std::istreambuf_iterator<char>(is)), {});
  EXPECT_EQ(back, data);
  std::filesystem::remove(path);
}

TEST(Threads, ResolutionOrder) {
  EXPECT_EQ(resolve_threads(3), 3);
  setenv("NEWTON_MODULI_THREADS", "5", 1);
  EXPECT_EQ(resolve_threads(0), 5);
  unsetenv("NEWTON_MODULI_THREADS");
  EXPECT_GE(resolve_threads(0), 1);
}
