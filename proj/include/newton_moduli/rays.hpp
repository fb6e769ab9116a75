#ifndef NEWTON_MODULI_RAYS_HPP
#define NEWTON_MODULI_RAYS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "angles.hpp"
#include "core.hpp"
#include "dynamics.hpp"

namespace newton_moduli {

enum class RayPlane { Dynamical, Parameter };
enum class RayStatus { Ok, Bifurcated, BasinViolation, ContinuationFailed };

inline const char* to_string(RayStatus s) {
  switch (s) {
    case RayStatus::Ok: return "ok";
    case RayStatus::Bifurcated: return "bifurcated";
    case RayStatus::BasinViolation: return "basin-violation";
    case RayStatus::ContinuationFailed: return "continuation-failed";
  }
  return "?";
}

struct RaySample {
  double potential;
  cplx point;
};

// pullback chain of one sample: chain[k] lies on the ray of angle 2^k theta
struct RayCheckpoint {
  double potential;
  std::vector<cplx> chain;
};

struct RayPath {
  RayPlane plane = RayPlane::Dynamical;
  int basin = 0;
  Angle angle;
  std::vector<RaySample> samples;
  std::vector<RayCheckpoint> checkpoints;
  ExtComplex landing_estimate;
  bool converged = false;
  RayStatus status = RayStatus::Ok;
  double max_branch_residual = 0.0;
  int bifurcation_level = -1;
  std::string note;
};

struct RayOptions {
  double s0 = 1e-4;
  double ratio = 0.85;  // s -> s^ratio between samples
  double s_max = 1.0 - 1e-4;
  std::vector<double> checkpoints;
  bool verify_basin = true;
  double ambiguity_ratio = 3.0;
  double min_step = 1e-12;
};

namespace detail {

inline double u_of(double s) { return std::log(-std::log(s)); }
inline double s_of(double u) { return std::exp(-std::exp(u)); }
// s^(2^k) at u
inline double s_pow(double u, int k) { return std::exp(-std::ldexp(std::exp(u), k)); }

inline double circle_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

inline std::vector<double> level_angles(const Angle& theta, int levels) {
  std::vector<double> out;
  Angle t = theta;
  for (int k = 0; k < levels; ++k) {
    out.push_back(t.to_unit_interval());
    t = double_angle(t);
  }
  return out;
}

}  // namespace detail

inline cplx inverse_boettcher(const NewtonMap& f, int eps, cplx zeta) {
  const cplx b = f.root(eps), c = f.boettcher_coeff(eps);
  cplx z = b + zeta / c;
  for (int it = 0; it < 40; ++it) {
    const auto L = log_boettcher(f, eps, z);
    if (!L.converged || L.at_center) break;
    const cplx phi = std::exp(L.log_phi);
    const cplx dz = (phi - zeta) / (phi * L.dlog);
    z -= dz;
    if (std::abs(dz) <= 1e-15 * std::abs(z - b)) break;
  }
  return z;
}

// potential at which the ray of angle theta runs into a preimage of 0, if any
struct CriticalCrossing {
  double potential;
  int level;
};

inline std::optional<CriticalCrossing> critical_crossing(const NewtonMap& f, int eps,
                                                         const Angle& theta) {
  const cplx zero = NewtonMap::free_critical_point();
  if (basin_of(f, zero).basin != eps) return std::nullopt;
  if (std::abs(zero - f.root(eps)) < 1e-14) return std::nullopt;
  const ExtComplex v = f.eval(zero);
  if (v.is_inf() || !descend_to_root(f, eps, v.value()).immediate) return std::nullopt;
  const auto L = log_boettcher(f, eps, zero);
  if (!L.converged) return std::nullopt;
  const double r0 = std::exp(L.log_phi.real());
  double alpha = L.log_phi.imag() / (2.0 * std::numbers::pi);
  alpha -= std::floor(alpha);
  const auto angles = detail::level_angles(theta, 60);
  for (int j = 0; j < 60; ++j)
    if (detail::circle_distance(angles[j], alpha) < 1e-9)
      return CriticalCrossing{std::pow(r0, std::ldexp(1.0, -j)), j};
  return std::nullopt;
}

namespace detail {

struct Lift {
  bool ok = false;
  std::vector<cplx> chain;
  int ambiguous_level = -1;
  cplx pair_a, pair_b;
  double worst = 0.0;  // largest d1/d2 seen
};

inline Lift lift_chain(const NewtonMap& f, int eps, const std::vector<double>& angles, double u,
                       const RayOptions& opt, const std::vector<cplx>& prev,
                       const std::vector<cplx>& prev2, double hr) {
  Lift out;
  int n = 0;
  while (s_pow(u, n) > opt.s0) ++n;
  const double two_pi = 2.0 * std::numbers::pi;
  out.chain.assign(n + 1, cplx(0));
  out.chain[n] = inverse_boettcher(f, eps, s_pow(u, n) * std::polar(1.0, two_pi * angles[n]));
  for (int k = n - 1; k >= 0; --k) {
    cplx ref;
    if (k < static_cast<int>(prev.size())) {
      ref = prev[k];
      if (k < static_cast<int>(prev2.size())) ref += (prev[k] - prev2[k]) * hr;
    } else {
      ref = inverse_boettcher(f, eps, s_pow(u, k) * std::polar(1.0, two_pi * angles[k]));
    }
    auto cands = f.preimages(out.chain[k + 1]);
    std::sort(cands.begin(), cands.end(), [&](const ExtComplex& a, const ExtComplex& b) {
      return chordal(a, ref) < chordal(b, ref);
    });
    const double d1 = chordal(cands[0], ref), d2 = chordal(cands[1], ref);
    if (d2 > 0) out.worst = std::max(out.worst, d1 / d2);
    if (d2 < opt.ambiguity_ratio * d1 || cands[0].is_inf()) {
      out.ambiguous_level = k;
      out.pair_a = cands[0].is_inf() ? ref : cands[0].value();
      out.pair_b = cands[1].is_inf() ? ref : cands[1].value();
      return out;
    }
    out.chain[k] = cands[0].value();
  }
  out.ok = true;
  return out;
}

}  // namespace detail

inline RayPath trace_internal_ray(const NewtonMap& f, int eps, const Angle& theta,
                                  const RayOptions& opt = {}) {
  if (eps < 1 || eps > 3) throw domain_error("basin index must be 1, 2 or 3");
  if (!(opt.s_max > opt.s0 && opt.s_max < 1.0)) throw domain_error("s_max must lie in (s0, 1)");
  RayPath path;
  path.plane = RayPlane::Dynamical;
  path.basin = eps;
  path.angle = theta;

  double s_end = opt.s_max;
  std::optional<CriticalCrossing> crossing = critical_crossing(f, eps, theta);
  if (crossing && crossing->potential >= s_end) crossing.reset();
  if (crossing) s_end = crossing->potential;

  const auto angles = detail::level_angles(theta, 64);
  const double two_pi = 2.0 * std::numbers::pi;
  const double H = -std::log(opt.ratio);
  const double u_end = detail::u_of(s_end);
  std::vector<double> stops;
  for (double c : opt.checkpoints)
    if (c > opt.s0 && c <= s_end) stops.push_back(detail::u_of(c));
  std::sort(stops.begin(), stops.end(), std::greater<>());

  double u = detail::u_of(opt.s0);
  std::vector<cplx> prev{inverse_boettcher(f, eps, opt.s0 * std::polar(1.0, two_pi * angles[0]))};
  std::vector<cplx> prev2;
  path.samples.push_back({opt.s0, prev[0]});
  double h = H, h_prev = 0.0;
  std::size_t next_stop = 0;

  auto finish_bifurcated = [&](int level, std::string note) {
    path.status = RayStatus::Bifurcated;
    path.bifurcation_level = level;
    path.landing_estimate = path.samples.back().point;
    path.note = std::move(note);
  };

  constexpr double snap = 1e-12;
  while (u > u_end + snap) {
    double target = u_end;
    while (next_stop < stops.size() && stops[next_stop] >= u - snap) ++next_stop;
    if (next_stop < stops.size()) target = std::max(target, stops[next_stop]);
    const double hh = std::min(h, u - target);
    const double un = (u - hh < target + snap) ? target : u - hh;
    const auto lift = detail::lift_chain(f, eps, angles, un, opt, prev, prev2,
                                         h_prev > 0 ? (u - un) / h_prev : 0.0);
    if (!lift.ok) {
      h = hh / 2;
      if (h < opt.min_step) {
        finish_bifurcated(lift.ambiguous_level, "ambiguous pullback at level " +
                                                    std::to_string(lift.ambiguous_level));
        path.landing_estimate = 0.5 * (lift.pair_a + lift.pair_b);
        return path;
      }
      continue;
    }
    const double s = detail::s_of(un);
    if (opt.verify_basin && basin_of(f, lift.chain[0]).basin != eps) {
      path.status = RayStatus::BasinViolation;
      path.note = "sample left basin " + std::to_string(eps);
      path.landing_estimate = path.samples.back().point;
      return path;
    }
    path.max_branch_residual = std::max(path.max_branch_residual, lift.worst);
    prev2 = std::move(prev);
    prev = lift.chain;
    h_prev = u - un;
    u = un;
    if (s > path.samples.back().potential) path.samples.push_back({s, prev[0]});
    if (next_stop < stops.size() && std::abs(u - stops[next_stop]) < snap) {
      path.checkpoints.push_back({s, prev});
      ++next_stop;
    }
    h = std::min(2 * hh, H);
  }
  path.landing_estimate = path.samples.back().point;
  if (crossing) finish_bifurcated(crossing->level, "ray meets a preimage of the critical point");
  return path;
}

struct LandingResult {
  ExtComplex point;
  bool converged = false;
  RayStatus status = RayStatus::Ok;
  std::vector<double> endpoint_gaps;  // distance to point at 1-10^-m, m = 2..6
  double final_gap = 0.0;
  double multiplier_abs = 0.0;  // of the periodic landing point, 0 if preperiodic to infinity
  std::string note;
};

namespace detail {

inline std::vector<double> landing_potentials() {
  std::vector<double> out;
  for (int m = 2; m <= 6; ++m) out.push_back(1.0 - std::pow(10.0, -m));
  return out;
}

inline RayOptions landing_options(RayOptions opt) {
  opt.s_max = 1.0 - 1e-6;
  opt.checkpoints = landing_potentials();
  return opt;
}

struct PeriodicPoint {
  ExtComplex point;
  double multiplier_abs;
  bool ok;
};

inline PeriodicPoint polish_periodic(const NewtonMap& f, cplx z, int p) {
  const auto info = polish_cycle(f, z, p);
  return {info.point, std::abs(info.multiplier), info.ok};
}

}  // namespace detail

class LandingSolver {
public:
  LandingSolver(const NewtonMap& f, int eps, RayOptions opt = {})
      : f_(f), eps_(eps), opt_(detail::landing_options(std::move(opt))) {}

  const RayPath& ray(const Angle& t) {
    const std::string key = t.str();
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, trace_internal_ray(f_, eps_, t, opt_)).first;
    return it->second;
  }

  LandingResult land(const Angle& theta) {
    LandingResult res;
    const RayPath& r0 = ray(theta);
    if (r0.status != RayStatus::Ok) {
      res.status = r0.status;
      res.point = r0.landing_estimate;
      res.note = r0.note;
      return res;
    }
    const auto shape = orbit_shape(theta);
    std::vector<Angle> level{theta};
    for (int k = 1; k <= shape.preperiod; ++k) level.push_back(double_angle(level.back()));
    for (const auto& a : level) {
      const RayPath& r = ray(a);
      if (r.status != RayStatus::Ok || r.checkpoints.size() < 5) {
        res.status = r.status == RayStatus::Ok ? RayStatus::BasinViolation : r.status;
        res.point = r0.landing_estimate;
        res.note = "level ray " + a.str() + " failed: " + r.note;
        return res;
      }
    }
    // index 3 -> 1-1e-5, index 4 -> 1-1e-6
    ExtComplex L5, L6;
    bool ok5 = pull_back(level, shape, 3, L5, res), ok6 = pull_back(level, shape, 4, L6, res);
    res.point = L6;
    if (!ok5 || !ok6) return res;
    res.final_gap = chordal(L5, L6);
    for (const auto& cp : r0.checkpoints) res.endpoint_gaps.push_back(chordal(cp.chain[0], L6));
    bool cauchy = true;
    for (std::size_t m = 1; m < res.endpoint_gaps.size(); ++m) {
      const double a = res.endpoint_gaps[m - 1], b = res.endpoint_gaps[m];
      if (b > 1e-13 && !(b < 0.8 * a)) cauchy = false;
    }
    res.converged = cauchy && res.final_gap < 1e-6;
    if (!cauchy) res.note = "endpoints are not Cauchy (possible parabolic landing)";
    return res;
  }

private:
  bool pull_back(const std::vector<Angle>& level, const OrbitShape& shape, std::size_t cp,
                 ExtComplex& out, LandingResult& res) {
    const int m = shape.preperiod;
    const RayPath& top = ray(level[m]);
    ExtComplex L;
    if (shape.period == 1 && top.angle == Angle(1, 1)) {
      L = ExtComplex::infinity();
    } else {
      const auto pp = detail::polish_periodic(f_, top.checkpoints[cp].chain[0], shape.period);
      res.multiplier_abs = pp.multiplier_abs;
      if (!pp.ok) {
        res.note = "periodic landing point did not polish";
        return false;
      }
      if (pp.multiplier_abs <= 1.0 + 1e-6) {
        res.note = "periodic landing point is not repelling";
        return false;
      }
      L = pp.point;
    }
    for (int k = m - 1; k >= 0; --k) {
      const cplx e = ray(level[k]).checkpoints[cp].chain[0];
      auto cands = f_.preimages(L);
      L = *std::min_element(cands.begin(), cands.end(), [&](const ExtComplex& a, const ExtComplex& b) {
        return chordal(a, e) < chordal(b, e);
      });
    }
    out = L;
    return true;
  }

  const NewtonMap& f_;
  int eps_;
  RayOptions opt_;
  std::map<std::string, RayPath> cache_;
};

inline LandingResult landing_point(const NewtonMap& f, const RayPath& ray, const RayOptions& opt = {}) {
  if (ray.plane != RayPlane::Dynamical) throw domain_error("landing needs a dynamical ray");
  if (ray.samples.empty() || ray.samples.back().potential < 1.0 - 1e-2 - 1e-12)
    if (ray.status == RayStatus::Ok) throw domain_error("ray must be traced to potential 0.99 or more");
  LandingSolver solver(f, ray.basin, opt);
  return solver.land(ray.angle);
}

struct CoLanding {
  bool co_land = false;
  bool bifurcated = false;
  double distance = 0.0;
  LandingResult first, second;  // R^1(theta), R^2(1 - theta)
};

inline CoLanding co_land(const NewtonMap& f, const Angle& theta, const RayOptions& opt = {}) {
  CoLanding out;
  LandingSolver s1(f, 1, opt), s2(f, 2, opt);
  out.first = s1.land(theta);
  out.second = s2.land(reflect(theta));
  out.bifurcated = out.first.status == RayStatus::Bifurcated || out.second.status == RayStatus::Bifurcated;
  out.distance = point_distance(out.first.point, out.second.point);
  out.co_land = out.first.converged && out.second.converged && out.distance < 1e-5;
  return out;
}

struct HeadProbe {
  Angle angle;
  bool co_land;
  bool bifurcated;
  double distance;
};

struct HeadBracket {
  Angle lo, hi;
  std::vector<HeadProbe> evidence;
  bool pinched_to_gap = false;
  bool capped = false;
};

inline HeadBracket head_angle(const Parameter& lambda, double width_target = 1e-3,
                              const RayOptions& opt = {}, int max_probes = 40) {
  if (width_target < 1e-4) throw domain_error("width target must be at least 1e-4");
  const auto cls = classify(lambda);
  if (cls.variant == Variant::TypeA && (cls.basin == 1 || cls.basin == 2))
    throw domain_error("head angle needs the critical point outside the immediate basins 1 and 2");
  const NewtonMap f(lambda);
  HeadBracket br;
  auto probe = [&](const Angle& a) {
    const auto c = co_land(f, a, opt);
    br.evidence.push_back({a, c.co_land, c.bifurcated, c.distance});
    return c.co_land;
  };
  br.hi = half();
  if (!probe(br.hi)) br.capped = true;
  br.lo = Angle(1, 64);
  while (probe(br.lo)) {
    br.lo = Angle(br.lo.num(), 2 * br.lo.den());
    if (br.lo.den() > (bigint(1) << 24)) throw numerical_failure("no lower angle fails co-landing");
  }
  int probes = 0;
  while (true) {
    const double width = br.hi.to_double() - br.lo.to_double();
    if (width < width_target) break;
    if (++probes > max_probes) {
      br.capped = true;
      break;
    }
    Angle mid;
    try {
      mid = boundary_Xi_between(br.lo, br.hi);
    } catch (const domain_error&) {
      br.pinched_to_gap = true;
      break;
    } catch (const numerical_failure&) {
      br.capped = true;
      break;
    }
    if (probe(mid)) br.hi = mid;
    else br.lo = mid;
  }
  return br;
}

inline cplx parameter_center(int eps) {
  if (eps == 1) return -0.5;
  if (eps == 2) return 0.5;
  throw domain_error("only basins 1 and 2 have a parameter center");
}

namespace detail {

// branch of phi_lambda(0) closest to ref
inline cplx phi0_near(int eps, cplx lambda, cplx ref) {
  const NewtonMap f(lambda);
  const cplx b = f.root(eps), c = f.boettcher_coeff(eps);
  std::vector<cplx> us{-b};
  while (std::abs(us.back()) >= 1e-12 && us.size() < 20000) {
    const cplx x = b + us.back();
    us.push_back(f.offset_factor(eps, x) * us.back() * us.back());
    if (!std::isfinite(std::abs(us.back()))) throw numerical_failure("orbit escaped");
  }
  // first index after which every factor stays near c
  std::size_t m = us.size() - 1;
  for (std::size_t j = us.size() - 1; j-- > 0;) {
    if (std::abs(f.offset_factor(eps, b + us[j]) - c) < 0.5 * std::abs(c)) m = j;
    else break;
  }
  const cplx base = std::exp(log_boettcher(f, eps, b + us[m]).log_phi * std::ldexp(1.0, -int(m)));
  cplx best = base;
  double best_d = 1e300;
  const std::size_t count = std::size_t(1) << std::min<std::size_t>(m, 20);
  for (std::size_t k = 0; k < count; ++k) {
    const cplx cand = base * std::polar(1.0, 2.0 * std::numbers::pi * double(k) / double(count));
    if (std::abs(cand - ref) < best_d) {
      best_d = std::abs(cand - ref);
      best = cand;
    }
  }
  return best;
}

inline cplx phi0_along(int eps, cplx from, cplx value_at_from, cplx to, int steps) {
  cplx prev = value_at_from;
  for (int i = 1; i <= steps; ++i) prev = phi0_near(eps, from + (to - from) * (double(i) / steps), prev);
  return prev;
}

}  // namespace detail

// continuation of phi_lambda(0) from the center along a straight segment
inline cplx phi0_by_continuation(int eps, cplx lambda, int steps = 400) {
  const cplx center = parameter_center(eps);
  const cplx first = center + (lambda - center) / double(steps);
  const cplx b = NewtonMap(first).root(eps);
  const cplx start = detail::phi0_near(eps, first, std::sqrt(3.0) * b * b);
  return detail::phi0_along(eps, first, start, lambda, steps - 1);
}

inline cplx phi0(int eps, const Parameter& lambda) {
  if (eps < 1 || eps > 3) throw domain_error("basin index must be 1, 2 or 3");
  if (eps != 3 && std::abs(lambda.value() - parameter_center(eps)) < 1e-14)
    throw domain_error("phi0 is not taken at the center");
  const auto cls = classify(lambda);
  if (cls.variant != Variant::TypeA || cls.basin != eps)
    throw domain_error("phi0 needs the critical point in the immediate basin " + std::to_string(eps));
  const NewtonMap f(lambda);
  const auto v = boettcher(f, eps, NewtonMap::free_critical_point());
  if (!v.branch_ok) {
    if (eps == 3) throw numerical_failure("phi0 branch check failed");
    return phi0_by_continuation(eps, lambda.value());
  }
  return v.value;
}

inline cplx capture_uniformizer(const Parameter& lambda, int eps, int k) {
  const auto cls = classify(lambda);
  if (cls.variant != Variant::TypeC || cls.basin != eps || cls.level != k)
    throw domain_error("parameter is not captured into basin " + std::to_string(eps) + " at level " +
                       std::to_string(k));
  const NewtonMap f(lambda);
  ExtComplex z = NewtonMap::free_critical_point();
  for (int i = 0; i < k; ++i) z = f.eval(z);
  const auto v = boettcher(f, eps, z.value());
  if (!v.branch_ok) throw numerical_failure("branch check failed for the capture uniformizer");
  return v.value;
}

struct ParameterRayOptions {
  double r0 = 1e-3;
  double ratio = 0.9;  // r -> r^ratio
  int max_halvings = 20;
  bool verify_type = true;
};

inline RayPath trace_parameter_ray(int eps, const Angle& t, double r_max,
                                   const ParameterRayOptions& opt = {}) {
  if (eps != 1 && eps != 2) throw domain_error("parameter rays are traced for basins 1 and 2");
  if (!(r_max > opt.r0 && r_max < 1.0)) throw domain_error("r_max must lie in (r0, 1)");
  const double tv = eps == 1 ? t.to_unit_interval() : t.to_double();
  if (eps == 1 && tv > 0.5) throw domain_error("basin 1 parameter rays need t in [0, 1/2]");
  if (eps == 2 && tv < 0.5) throw domain_error("basin 2 parameter rays need t in [1/2, 1]");

  RayPath path;
  path.plane = RayPlane::Parameter;
  path.basin = eps;
  path.angle = t;
  const double pi = std::numbers::pi;
  const cplx dir = std::polar(1.0, 2.0 * pi * tv);
  cplx target{};

  auto Phi = [&](cplx l) -> std::optional<cplx> {
    if (!is_valid_parameter(l)) return std::nullopt;
    const NewtonMap f(l);
    if (basin_of(f, 0.0).basin != eps) return std::nullopt;
    return detail::phi0_near(eps, l, target);
  };
  auto correct = [&](cplx guess, double r) -> std::optional<cplx> {
    target = r * dir;
    cplx l = guess;
    auto F = Phi(l);
    if (!F) return std::nullopt;
    for (int it = 0; it < 60; ++it) {
      const cplx res = *F - target;
      if (std::abs(res) < 1e-14) return l;
      const double hstep = 1e-7 * std::max(1e-2, std::abs(l - parameter_center(eps)));
      const auto fp = Phi(l + hstep), fm = Phi(l - hstep);
      if (!fp || !fm) return std::nullopt;
      const cplx d = (*fp - *fm) / (2.0 * hstep);
      cplx step = res / d;
      bool improved = false;
      for (int damp = 0; damp < 30; ++damp) {
        const auto Fn = Phi(l - step);
        if (Fn && std::abs(*Fn - target) < std::abs(res)) {
          l -= step;
          F = Fn;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) return std::abs(res) < 1e-12 ? std::optional<cplx>(l) : std::nullopt;
      if (std::abs(step) < 1e-16) return l;
    }
    return std::abs(*F - target) < 1e-12 ? std::optional<cplx>(l) : std::nullopt;
  };
  auto accept = [&](cplx l) {
    if (!opt.verify_type) return true;
    const auto c = classify(Parameter(l));
    return c.variant == Variant::TypeA && c.basin == eps;
  };

  // phi0 ~ sqrt(3) b^2 near the center
  double r = opt.r0;
  const double rad = std::sqrt(r / std::sqrt(3.0));
  const cplx anchor = eps == 1 ? cplx(-0.5) + rad * std::polar(1.0, pi * tv)
                               : cplx(0.5) - rad * std::polar(1.0, pi * (tv - 1.0));
  auto first = correct(anchor, r);
  if (!first || !accept(*first)) {
    path.status = RayStatus::ContinuationFailed;
    path.note = "initial correction failed";
    return path;
  }
  path.samples.push_back({r, *first});
  const double H = -std::log(opt.ratio);
  double v = std::log(-std::log(r));
  const double v_end = std::log(-std::log(r_max));
  double h = H;
  int halvings = 0;
  while (v > v_end + 1e-12) {
    const double hh = std::min(h, v - v_end);
    const double vn = v - hh < v_end + 1e-12 ? v_end : v - hh;
    const double rn = std::exp(-std::exp(vn));
    cplx guess = path.samples.back().point;
    if (path.samples.size() >= 2) {
      const auto& a = path.samples[path.samples.size() - 2];
      const auto& b = path.samples.back();
      const double va = std::log(-std::log(a.potential));
      guess = b.point + (b.point - a.point) * ((vn - v) / (v - va));
    }
    auto next = correct(guess, rn);
    if (next) {
      const auto& last = path.samples.back();
      const cplx tracked = detail::phi0_along(eps, last.point, last.potential * dir, *next, 16);
      if (std::abs(tracked - rn * dir) > 1e-8) next.reset();
    }
    if (!next || !accept(*next)) {
      h = hh / 2;
      if (++halvings > opt.max_halvings) {
        path.status = RayStatus::ContinuationFailed;
        path.note = "continuation stalled at r = " + std::to_string(path.samples.back().potential);
        break;
      }
      continue;
    }
    halvings = 0;
    path.samples.push_back({rn, *next});
    v = vn;
    h = std::min(2 * hh, H);
  }
  path.landing_estimate = path.samples.back().point;
  path.converged = path.status == RayStatus::Ok;
  return path;
}

}  // namespace newton_moduli

#endif  // NEWTON_MODULI_RAYS_HPP
