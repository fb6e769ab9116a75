#ifndef NEWTON_MODULI_DYNAMICS_HPP
#define NEWTON_MODULI_DYNAMICS_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace newton_moduli {

struct BasinResult {
  int basin = 0;  // 0: none
  int iterations = 0;
};

inline BasinResult basin_of(const NewtonMap& f, cplx z, int max_iter = 10000, double tol = 1e-8) {
  ExtComplex w = z;
  for (int it = 0; it <= max_iter; ++it) {
    if (w.is_inf()) return {0, it};
    const cplx v = w.value();
    for (int e = 1; e <= 3; ++e) {
      const double d = std::abs(v - f.root(e));
      if (d < tol) {
        const ExtComplex next = f.eval(v);
        if (next.is_finite() && std::abs(next.value() - f.root(e)) <= d) return {e, it};
      }
    }
    w = f.eval(w);
  }
  return {0, max_iter};
}

// log of the Boettcher coordinate, principal branch per factor, with d/dz
struct LogBoettcher {
  cplx log_phi;       // real part is the Green function
  cplx dlog;          // derivative of log_phi
  bool converged = false;
  bool at_center = false;  // z is an iterated preimage of the root
  int iterations = 0;
};

namespace detail {

template <bool Full>
LogBoettcher log_boettcher_impl(const NewtonMap& f, int eps, cplx z, int max_iter = 10000) {
  LogBoettcher r;
  const cplx b = f.root(eps), c = f.boettcher_coeff(eps);
  const cplx o1 = f.root(eps % 3 + 1), o2 = f.root((eps + 1) % 3 + 1);
  cplx u = z - b;
  if (u == cplx(0)) {
    r.converged = r.at_center = true;
    r.log_phi = cplx(-std::numeric_limits<double>::infinity(), 0.0);
    return r;
  }
  double re = 0.5 * std::log(std::norm(u));
  double im = Full ? std::arg(u) : 0.0;
  cplx q = 1.0 / u;
  double w = 1.0;  // 2^-j
  for (int j = 0; j < max_iter; ++j) {
    if (std::abs(u) < 1e-12) {
      re += w * std::log(std::abs(c));
      if (Full) im += w * std::arg(c);
      r.log_phi = {re, im};
      r.dlog = w * q;
      r.converged = true;
      r.iterations = j;
      return r;
    }
    const cplx x = b + u;
    const cplx dp = f.dpoly(x);
    const cplx num = 2.0 * x + b;
    if (std::abs(dp) < 1e-300 || !std::isfinite(std::abs(u)) || std::abs(u) > 1e12) {
      r.iterations = j;
      return r;
    }
    const cplx g = num / dp;
    if (g == cplx(0)) {  // x = -b/2 maps onto the root
      r.converged = r.at_center = true;
      r.log_phi = cplx(-std::numeric_limits<double>::infinity(), 0.0);
      r.iterations = j;
      return r;
    }
    w *= 0.5;
    re += w * 0.5 * std::log(std::norm(g));
    if (Full) im += w * std::arg(g);
    q *= 6.0 * x * (x - o1) * (x - o2) / (dp * num);
    u = g * u * u;
  }
  r.iterations = max_iter;
  return r;
}

}  // namespace detail

inline LogBoettcher log_boettcher(const NewtonMap& f, int eps, cplx z) {
  return detail::log_boettcher_impl<true>(f, eps, z);
}

inline void require_basin(const NewtonMap& f, int eps, cplx z) {
  if (eps < 1 || eps > 3) throw domain_error("basin index must be 1, 2 or 3");
  if (basin_of(f, z).basin != eps)
    throw domain_error("point " + format_complex(z) + " is not in basin " + std::to_string(eps));
}

inline double green(const NewtonMap& f, int eps, cplx z) {
  require_basin(f, eps, z);
  const auto r = detail::log_boettcher_impl<false>(f, eps, z);
  if (!r.converged) throw numerical_failure("Green function did not converge");
  return r.log_phi.real();
}

struct BoettcherValue {
  cplx value;
  bool branch_ok = true;
  double branch_residual = 0.0;
};

inline BoettcherValue boettcher(const NewtonMap& f, int eps, cplx z) {
  require_basin(f, eps, z);
  const auto r = log_boettcher(f, eps, z);
  if (!r.converged) throw numerical_failure("Boettcher product did not converge");
  BoettcherValue out;
  out.value = r.at_center ? cplx(0) : std::exp(r.log_phi);
  const ExtComplex nz = f.eval(z);
  if (nz.is_finite()) {
    const auto rn = log_boettcher(f, eps, nz.value());
    if (rn.converged) {
      const cplx img = rn.at_center ? cplx(0) : std::exp(rn.log_phi);
      out.branch_residual = std::abs(img - out.value * out.value);
      out.branch_ok = out.branch_residual <= 1e-4;
    }
  }
  return out;
}

// Follows the ray of z downwards by Newton steps on log(phi); the walk ends at
// the root exactly when z lies in the immediate basin.
struct DescentResult {
  bool immediate = false;
  bool reached_zero = false;
  int steps = 0;
  cplx endpoint;
};

inline DescentResult descend_to_root(const NewtonMap& f, int eps, cplx z, int max_steps = 2000) {
  DescentResult res;
  const cplx b = f.root(eps), c = f.boettcher_coeff(eps);
  const double c_abs = std::abs(c);
  auto eval = [&](cplx x) { return detail::log_boettcher_impl<false>(f, eps, x); };
  auto near_root = [&](cplx x) { return c_abs * std::abs(x - b) < 1e-5 || x == b; };
  LogBoettcher cur = eval(z);
  if (!cur.converged) return res;
  if (cur.at_center) {
    res.reached_zero = true;
    res.immediate = near_root(z) || std::abs(z - b) < 1e-12;
    res.endpoint = z;
    return res;
  }
  if (std::abs(cur.dlog) < 1e-300) {
    z += 1e-9 * (1.0 + std::abs(z));
    cur = eval(z);
    if (!cur.converged) return res;
  }
  for (int step = 0; step < max_steps; ++step) {
    res.steps = step;
    const double G = cur.log_phi.real();
    if (cur.at_center || G < std::log(1e-6)) {
      res.reached_zero = true;
      res.immediate = near_root(z);
      res.endpoint = z;
      return res;
    }
    double delta = std::min(0.5, 0.5 * std::abs(G));
    bool moved = false;
    for (int halving = 0; halving < 50; ++halving) {
      const cplx zn = z - delta / cur.dlog;
      const LogBoettcher nxt = eval(zn);
      if (nxt.converged && (nxt.at_center || nxt.log_phi.real() <= G - 0.25 * delta)) {
        z = zn;
        cur = nxt;
        moved = true;
        break;
      }
      delta *= 0.5;
    }
    if (!moved) break;
  }
  res.endpoint = z;
  return res;
}

struct GridSpec {
  cplx center{0.0, 0.0};
  double half_width = 4.0;
  int resolution = 1024;
};

struct BasinGrid {
  GridSpec spec;
  std::vector<std::uint8_t> label;  // 0 undecided, 1..3 basin
  std::vector<std::uint16_t> iterations;
  std::vector<std::uint8_t> mask;   // immediate basin component
  int basin = 0;

  double step() const { return 2.0 * spec.half_width / spec.resolution; }
  std::optional<std::size_t> cell_of(cplx z) const {
    const double x = (z.real() - (spec.center.real() - spec.half_width)) / step();
    const double y = (z.imag() - (spec.center.imag() - spec.half_width)) / step();
    if (x < 0 || y < 0 || x >= spec.resolution || y >= spec.resolution) return std::nullopt;
    return static_cast<std::size_t>(y) * spec.resolution + static_cast<std::size_t>(x);
  }
  cplx cell_center(std::size_t idx) const {
    const auto x = idx % spec.resolution, y = idx / spec.resolution;
    return {spec.center.real() - spec.half_width + (x + 0.5) * step(),
            spec.center.imag() - spec.half_width + (y + 0.5) * step()};
  }
  bool contains(cplx z) const {
    const auto c = cell_of(z);
    return c && mask[*c] != 0;
  }
};

inline BasinGrid immediate_basin_mask(const NewtonMap& f, int eps, const GridSpec& spec = {}) {
  if (spec.resolution < 256) throw domain_error("grid resolution must be at least 256");
  BasinGrid g;
  g.spec = spec;
  g.basin = eps;
  const std::size_t n = static_cast<std::size_t>(spec.resolution) * spec.resolution;
  g.label.assign(n, 0);
  g.iterations.assign(n, 0);
  g.mask.assign(n, 0);
  const auto seed = g.cell_of(f.root(eps));
  if (!seed) throw domain_error("root lies outside the grid");
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = basin_of(f, g.cell_center(i), 2000);
    g.label[i] = static_cast<std::uint8_t>(r.basin);
    g.iterations[i] = static_cast<std::uint16_t>(std::min(r.iterations, 65535));
  }
  g.label[*seed] = static_cast<std::uint8_t>(eps);
  std::vector<std::size_t> stack{*seed};
  g.mask[*seed] = 1;
  const std::size_t res = spec.resolution;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const std::size_t x = i % res, y = i / res;
    const std::size_t nb[4] = {x > 0 ? i - 1 : i, x + 1 < res ? i + 1 : i, y > 0 ? i - res : i,
                               y + 1 < res ? i + res : i};
    for (std::size_t j : nb)
      if (!g.mask[j] && g.label[j] == eps) {
        g.mask[j] = 1;
        stack.push_back(j);
      }
  }
  return g;
}

enum class Variant { TypeA, TypeC, TypeD, PreRepelling, Undecided };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::TypeA: return "TypeA";
    case Variant::TypeC: return "TypeC";
    case Variant::TypeD: return "TypeD";
    case Variant::PreRepelling: return "PreRepelling";
    case Variant::Undecided: return "Undecided";
  }
  return "?";
}

enum class CaptureMethod { Descent, Grid };

struct ClassifyOptions {
  int max_iter = 10000;
  double root_tol = 1e-8;
  double infinity_tol = 1e-10;  // chordal
  double cycle_tol = 1e-9;
  int max_period = 64;
  double neutral_band = 1e-4;
  CaptureMethod method = CaptureMethod::Descent;
  int grid_resolution = 1024;
  bool check_resolution = false;  // grid only: recompute at doubled resolution
};

struct Classification {
  Variant variant = Variant::Undecided;
  int basin = 0;
  int level = 0;
  int period = 0;
  cplx multiplier{};
  cplx cycle_point{};
  std::string note;
  int iterations = 0;
  double residual = 0.0;
  int resolution = 0;  // 0 for the descent test
  bool level_flagged = false;
};

namespace detail {

struct CycleInfo {
  cplx point;
  cplx multiplier;
  double residual;
  bool ok;
};

inline CycleInfo polish_cycle(const NewtonMap& f, cplx z, int p) {
  CycleInfo info{z, 0.0, 1e300, false};
  for (int it = 0; it < 60; ++it) {
    ExtComplex w = z;
    cplx d = 1.0;
    for (int k = 0; k < p; ++k) {
      if (w.is_inf()) return info;
      d *= f.derivative(w);
      w = f.eval(w);
    }
    if (w.is_inf()) return info;
    const cplx F = w.value() - z;
    info.residual = std::abs(F);
    info.multiplier = d;
    info.point = z;
    if (info.residual < 1e-14 * (1.0 + std::abs(z))) break;
    z -= F / (d - 1.0);
  }
  info.ok = info.residual < 1e-12 * (1.0 + std::abs(info.point)) || info.residual < 1e-12;
  return info;
}

}  // namespace detail

inline Classification classify(const Parameter& lambda, const ClassifyOptions& opt = {}) {
  const NewtonMap f(lambda);
  Classification out;
  std::vector<cplx> orbit;
  orbit.reserve(256);
  ExtComplex w = NewtonMap::free_critical_point();
  int root = 0;
  for (int n = 0; n <= opt.max_iter; ++n) {
    if (w.is_inf() || chordal(w, ExtComplex::infinity()) < opt.infinity_tol) {
      out.variant = Variant::PreRepelling;
      out.note = "infinity";
      out.iterations = n;
      out.residual = chordal(w, ExtComplex::infinity());
      return out;
    }
    const cplx z = w.value();
    orbit.push_back(z);
    for (int e = 1; e <= 3 && !root; ++e)
      if (std::abs(z - f.root(e)) < opt.root_tol) root = e;
    if (root) break;
    if (n >= opt.max_period && n % opt.max_period == 0) {
      int period = 0;
      for (int p = 1; p <= opt.max_period; ++p)
        if (std::abs(z - orbit[n - p]) < opt.cycle_tol) {
          period = p;
          break;
        }
      if (period) {
        const int base = n - (n % period);
        const auto cyc = detail::polish_cycle(f, orbit[base], period);
        out.iterations = n;
        out.period = period;
        out.multiplier = cyc.multiplier;
        out.cycle_point = cyc.point;
        out.residual = cyc.residual;
        const double m = std::abs(cyc.multiplier);
        if (!cyc.ok) {
          out.variant = Variant::Undecided;
          out.note = "cycle refinement failed";
        } else if (m < 1.0 - opt.neutral_band) {
          out.variant = Variant::TypeD;
        } else if (m <= 1.0 + opt.neutral_band) {
          out.variant = Variant::Undecided;
          out.note = "near-neutral";
        } else {
          out.variant = Variant::PreRepelling;
          out.note = "repelling cycle of period " + std::to_string(period);
        }
        return out;
      }
    }
    w = f.eval(w);
  }
  if (!root) {
    out.variant = Variant::Undecided;
    out.iterations = opt.max_iter;
    out.note = "max_iter";
    return out;
  }
  const int n = static_cast<int>(orbit.size()) - 1;
  out.iterations = n;
  out.basin = root;
  out.residual = std::abs(orbit.back() - f.root(root));

  auto capture_index = [&](auto&& immediate) {
    // membership in the immediate basin is monotone along the orbit
    if (n == 0) return 0;
    int lo = 1, hi = n;
    if (immediate(orbit[1])) return 1;
    lo = 2;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (immediate(orbit[mid])) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  };

  int j = 0;
  if (opt.method == CaptureMethod::Descent) {
    j = capture_index([&](cplx z) { return descend_to_root(f, root, z).immediate; });
  } else {
    const GridSpec spec{0.0, 4.0, opt.grid_resolution};
    const auto mask = immediate_basin_mask(f, root, spec);
    auto first_inside = [&](const BasinGrid& m) {
      for (int k = 0; k <= n; ++k)
        if (m.contains(orbit[k])) return k;
      return n;
    };
    const int k0 = first_inside(mask);
    j = k0 == 0 ? 1 : k0;
    out.resolution = opt.grid_resolution;
    if (opt.check_resolution) {
      const auto fine = immediate_basin_mask(f, root, {0.0, 4.0, 2 * opt.grid_resolution});
      const int k1 = first_inside(fine);
      if ((k1 == 0 ? 1 : k1) != j) out.level_flagged = true;
    }
  }
  // N(0) in the immediate basin forces 0 into it as well
  if (j <= 1) {
    out.variant = Variant::TypeA;
    out.level = 0;
  } else {
    out.variant = Variant::TypeC;
    out.level = j;
  }
  return out;
}

struct AttractingCycle {
  int period;
  cplx point;
  cplx multiplier;
};

inline AttractingCycle attracting_cycle(const Parameter& lambda, const ClassifyOptions& opt = {}) {
  const auto c = classify(lambda, opt);
  if (c.variant != Variant::TypeD) throw domain_error("parameter is not of type D");
  return {c.period, c.cycle_point, c.multiplier};
}

}  // namespace newton_moduli

#endif  // NEWTON_MODULI_DYNAMICS_HPP
