#ifndef NEWTON_MODULI_RENDER_HPP
#define NEWTON_MODULI_RENDER_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "angles.hpp"
#include "core.hpp"
#include "dynamics.hpp"
#include "rays.hpp"

namespace newton_moduli {

enum class PlaneKind { Parameter, Dynamical };

struct RayOverlay {
  int basin;
  Angle angle;
};

struct RenderSpec {
  PlaneKind plane = PlaneKind::Parameter;
  cplx lambda{};  // dynamical plane only
  cplx lower_left{-1.5, -1.5};
  cplx upper_right{1.5, 1.5};
  int width = 256;
  int height = 256;
  int palette_version = 1;
  std::vector<RayOverlay> rays;
  std::vector<cplx> marks;
  ClassifyOptions classify;
  int dyn_max_iter = 500;
  int threads = 0;  // 0: resolve from environment
};

struct Rgb {
  std::uint8_t r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(std::size_t(w) * h * 3, 0) {}

  Rgb at(int x, int y) const {
    const std::size_t i = (std::size_t(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = (std::size_t(y) * width + x) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
  }
};

struct PixelLabel {
  Variant variant = Variant::Undecided;
  int basin = 0;
  int level = 0;
  int iterations = 0;
};

struct OverlayTrace {
  RayOverlay ray;
  RayPath path;
  std::vector<std::array<int, 2>> pixels;
};

struct RenderResult {
  Image image;
  std::vector<PixelLabel> labels;  // row major
  std::vector<OverlayTrace> overlays;
  std::vector<std::string> warnings;

  const PixelLabel& label(int x, int y) const { return labels[std::size_t(y) * image.width + x]; }
};

inline constexpr std::size_t max_render_pixels = std::size_t(1) << 26;

inline void validate(const RenderSpec& spec) {
  if (spec.width < 16 || spec.width > 16384 || spec.height < 16 || spec.height > 16384)
    throw domain_error("width and height must lie in [16, 16384]");
  if (!(spec.upper_right.real() > spec.lower_left.real()) || !(spec.upper_right.imag() > spec.lower_left.imag()))
    throw domain_error("bounding box is degenerate");
  if (std::size_t(spec.width) * spec.height > max_render_pixels)
    throw domain_error("image exceeds the allocation limit of " + std::to_string(max_render_pixels) + " pixels");
  if (spec.palette_version != 1) throw domain_error("unknown palette version");
  if (spec.plane == PlaneKind::Dynamical) (void)Parameter(spec.lambda);
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NEWTON_MODULI_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// pixel centers; row 0 is the top edge
inline cplx pixel_coordinate(const RenderSpec& spec, int x, int y) {
  const double dx = (spec.upper_right.real() - spec.lower_left.real()) / spec.width;
  const double dy = (spec.upper_right.imag() - spec.lower_left.imag()) / spec.height;
  return {spec.lower_left.real() + (x + 0.5) * dx, spec.upper_right.imag() - (y + 0.5) * dy};
}

inline std::optional<std::array<int, 2>> pixel_of(const RenderSpec& spec, cplx z) {
  const double fx = (z.real() - spec.lower_left.real()) / (spec.upper_right.real() - spec.lower_left.real());
  const double fy = (spec.upper_right.imag() - z.imag()) / (spec.upper_right.imag() - spec.lower_left.imag());
  if (!(fx >= 0 && fx < 1 && fy >= 0 && fy < 1)) return std::nullopt;
  return std::array<int, 2>{int(fx * spec.width), int(fy * spec.height)};
}

namespace palette {

inline constexpr Rgb basin_hue[4] = {{128, 128, 128}, {250, 210, 30}, {130, 40, 160}, {40, 200, 220}};
inline constexpr Rgb black{0, 0, 0};
inline constexpr Rgb white{255, 255, 255};
inline constexpr Rgb gray{128, 128, 128};
inline constexpr Rgb ray{230, 30, 30};
inline constexpr Rgb mark{20, 220, 40};

inline Rgb shade(Rgb c, double f) {
  auto s = [f](std::uint8_t v) { return std::uint8_t(std::lround(v * f)); };
  return {s(c.r), s(c.g), s(c.b)};
}

inline Rgb parameter_color(const PixelLabel& p) {
  switch (p.variant) {
    case Variant::TypeA: return basin_hue[p.basin];
    case Variant::TypeC: return shade(basin_hue[p.basin], std::max(0.25, 0.75 * std::pow(0.9, p.level - 1)));
    case Variant::TypeD: return black;
    case Variant::PreRepelling: return white;
    case Variant::Undecided: return gray;
  }
  return gray;
}

inline Rgb dynamical_color(const PixelLabel& p) {
  if (p.basin == 0) return black;
  return shade(basin_hue[p.basin], 0.35 + 0.65 * std::exp(-p.iterations / 30.0));
}

}  // namespace palette

namespace detail {

template <class Fn>
void for_each_row(int height, int threads, Fn&& fn) {
  threads = std::min(threads, height);
  if (threads <= 1) {
    for (int y = 0; y < height; ++y) fn(y);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int y; (y = next.fetch_add(1)) < height;) fn(y);
    });
  for (auto& th : pool) th.join();
}

inline void draw_segment(const RenderSpec& spec, Image& img, cplx a, cplx b, std::vector<std::array<int, 2>>& out) {
  const double px = (spec.upper_right.real() - spec.lower_left.real()) / spec.width;
  const int steps = std::clamp(int(std::abs(b - a) / (0.5 * px)) + 1, 1, 4 * (spec.width + spec.height));
  for (int i = 0; i <= steps; ++i) {
    const auto p = pixel_of(spec, a + (b - a) * (double(i) / steps));
    if (!p) continue;
    if (out.empty() || out.back() != *p) out.push_back(*p);
    img.set((*p)[0], (*p)[1], palette::ray);
  }
}

inline void draw_overlays(const RenderSpec& spec, const NewtonMap* f, RenderResult& res) {
  if (f) {
    for (const auto& ov : spec.rays) {
      OverlayTrace tr{ov, {}, {}};
      try {
        tr.path = trace_internal_ray(*f, ov.basin, ov.angle);
      } catch (const std::exception& e) {
        res.warnings.push_back("ray " + std::to_string(ov.basin) + ":" + ov.angle.str() + " skipped: " + e.what());
        continue;
      }
      if (tr.path.status == RayStatus::BasinViolation || tr.path.samples.size() < 2) {
        res.warnings.push_back("ray " + std::to_string(ov.basin) + ":" + ov.angle.str() + " skipped: " + tr.path.note);
        continue;
      }
      if (tr.path.status == RayStatus::Bifurcated)
        res.warnings.push_back("ray " + std::to_string(ov.basin) + ":" + ov.angle.str() + " bifurcates; drawn up to the crossing");
      for (std::size_t i = 1; i < tr.path.samples.size(); ++i)
        draw_segment(spec, res.image, tr.path.samples[i - 1].point, tr.path.samples[i].point, tr.pixels);
      res.overlays.push_back(std::move(tr));
    }
  } else if (!spec.rays.empty()) {
    res.warnings.push_back("ray overlays are drawn on the dynamical plane only");
  }
  for (cplx m : spec.marks) {
    const auto p = pixel_of(spec, m);
    if (!p) continue;
    for (int d = -2; d <= 2; ++d) {
      const int x = (*p)[0] + d, y = (*p)[1] + d, y2 = (*p)[1] - d;
      if (x < 0 || x >= spec.width) continue;
      if (y >= 0 && y < spec.height) res.image.set(x, y, palette::mark);
      if (y2 >= 0 && y2 < spec.height) res.image.set(x, y2, palette::mark);
    }
  }
}

}  // namespace detail

inline PixelLabel parameter_label(cplx lambda, const ClassifyOptions& opt) {
  if (!is_valid_parameter(lambda)) return {};
  const auto c = classify(Parameter(lambda), opt);
  return {c.variant, c.basin, c.level, c.iterations};
}

inline RenderResult render_parameter_plane(const RenderSpec& spec) {
  validate(spec);
  if (spec.plane != PlaneKind::Parameter) throw domain_error("spec is not a parameter-plane spec");
  RenderResult res;
  res.image = Image(spec.width, spec.height);
  res.labels.resize(std::size_t(spec.width) * spec.height);
  detail::for_each_row(spec.height, resolve_threads(spec.threads), [&](int y) {
    for (int x = 0; x < spec.width; ++x) {
      const PixelLabel p = parameter_label(pixel_coordinate(spec, x, y), spec.classify);
      res.labels[std::size_t(y) * spec.width + x] = p;
      res.image.set(x, y, palette::parameter_color(p));
    }
  });
  detail::draw_overlays(spec, nullptr, res);
  return res;
}

inline RenderResult render_dynamical_plane(const RenderSpec& spec) {
  validate(spec);
  if (spec.plane != PlaneKind::Dynamical) throw domain_error("spec is not a dynamical-plane spec");
  const NewtonMap f(spec.lambda);
  RenderResult res;
  res.image = Image(spec.width, spec.height);
  res.labels.resize(std::size_t(spec.width) * spec.height);
  detail::for_each_row(spec.height, resolve_threads(spec.threads), [&](int y) {
    for (int x = 0; x < spec.width; ++x) {
      const auto b = basin_of(f, pixel_coordinate(spec, x, y), spec.dyn_max_iter);
      const PixelLabel p{b.basin ? Variant::TypeA : Variant::Undecided, b.basin, 0, b.iterations};
      res.labels[std::size_t(y) * spec.width + x] = p;
      res.image.set(x, y, palette::dynamical_color(p));
    }
  });
  detail::draw_overlays(spec, &f, res);
  return res;
}

inline std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

inline void write_ppm(const Image& img, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw domain_error("cannot open '" + path + "' for writing");
  const std::string data = encode_ppm(img);
  os.write(data.data(), std::streamsize(data.size()));
  if (!os) throw domain_error("failed writing '" + path + "'");
}

}  // namespace newton_moduli

#endif  // NEWTON_MODULI_RENDER_HPP
