#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "newton_moduli.hpp"

using namespace newton_moduli;
using json = nlohmann::ordered_json;

namespace {

enum Exit { Ok = 0, Usage = 1, Domain = 2, Numerical = 3 };

double tidy(double x, int digits = 12) {
  if (std::abs(x) < std::pow(10.0, -digits - 1)) return 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::stod(buf);
}

json to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }
json to_json(const ExtComplex& p) { return p.is_inf() ? json("inf") : to_json(p.value()); }

json samples_json(const RayPath& r) {
  json out = json::array();
  for (const auto& s : r.samples) out.push_back({{"potential", s.potential}, {"re", s.point.real()}, {"im", s.point.imag()}});
  return out;
}

struct Context {
  bool as_json = false;
  int threads = 0;
  json doc = json::object();
  std::ostringstream text;
};

int run_classify(Context& ctx, const std::string& lambda, const std::string& method, int resolution) {
  ClassifyOptions opt;
  if (method == "grid") opt.method = CaptureMethod::Grid;
  else if (method != "descent") throw domain_error("method must be descent or grid");
  opt.grid_resolution = resolution;
  const auto c = classify(Parameter(parse_complex(lambda)), opt);
  ctx.doc = {{"variant", to_string(c.variant)},
             {"basin", c.basin},
             {"level", c.level},
             {"period", c.period},
             {"multiplier_re", c.multiplier.real()},
             {"multiplier_im", c.multiplier.imag()},
             {"iterations", c.iterations},
             {"resolution", c.resolution},
             {"note", c.note}};
  ctx.text << to_string(c.variant);
  if (c.basin) ctx.text << " basin " << c.basin;
  if (c.variant == Variant::TypeC) ctx.text << " level " << c.level;
  if (c.period) ctx.text << " period " << c.period << " multiplier " << format_complex(c.multiplier, 10);
  if (!c.note.empty()) ctx.text << " (" << c.note << ")";
  ctx.text << "\n";
  return c.variant == Variant::Undecided || c.level_flagged ? Numerical : Ok;
}

int run_orbit(Context& ctx, const std::string& lambda) {
  const Parameter p(parse_complex(lambda));
  const auto orb = parameter_orbit(p);
  const auto& g = group_elements();
  json entries = json::array();
  for (const auto& e : orb.entries) {
    entries.push_back({{"element", g.names[e.element]}, {"re", e.value.real()}, {"im", e.value.imag()}});
    ctx.text << g.names[e.element] << "\t" << format_complex(e.value, 15) << "\n";
  }
  const int stab = stabilizer_order(p.value());
  ctx.doc = {{"orbit", entries}, {"stabilizer", stab}, {"dropped_degenerate", orb.dropped_degenerate}};
  ctx.text << "stabilizer order " << stab << "\n";
  return Ok;
}

int run_reduce(Context& ctx, const std::string& lambda) {
  const auto r = reduce_to_fundamental_domain(Parameter(parse_complex(lambda)), 1e-9);
  const cplx v(tidy(r.value.real()), tidy(r.value.imag()));
  ctx.doc = {{"reduced", to_json(v)}, {"piece", to_string(r.piece)}, {"stabilizer", r.stabilizer}};
  ctx.text << format_complex(v, 12) << " in " << to_string(r.piece) << ", stabilizer order " << r.stabilizer << "\n";
  return Ok;
}

int run_xi(Context& ctx, const std::string& angle) {
  const Angle t = Angle::parse(angle);
  const bool in = in_Xi(t);
  ctx.doc = {{"angle", t.str()}, {"in_xi", in}};
  ctx.text << (in ? "in Xi" : "not in Xi") << "\n";
  return Ok;
}

int run_gaps(Context& ctx, int n, long long spot) {
  const auto gaps = enumerate_gaps(n, spot);
  json list = json::array();
  for (const auto& g : gaps) {
    list.push_back({{"p", g.p.str()}, {"n", g.n}, {"beta", g.beta().str()}, {"alpha", g.alpha().str()}});
    ctx.text << "(" << g.beta().str() << ", " << g.alpha().str() << ")\n";
  }
  ctx.doc = {{"n_max", n}, {"count", gaps.size()}, {"gaps", list}};
  return Ok;
}

int run_angle_class(Context& ctx, const std::string& angle) {
  const Angle t = Angle::parse(angle);
  const auto cls = classify_angle(t);
  const auto shape = orbit_shape(t);
  ctx.doc = {{"angle", t.str()}, {"class", to_string(cls)}, {"preperiod", shape.preperiod}, {"period", shape.period}};
  ctx.text << to_string(cls) << " preperiod " << shape.preperiod << " period " << shape.period << "\n";
  return Ok;
}

int run_ray(Context& ctx, const std::string& lambda, int basin, const std::string& angle, bool land, double smax) {
  const NewtonMap f(Parameter(parse_complex(lambda)).value());
  RayOptions opt;
  opt.s_max = smax;
  const auto path = trace_internal_ray(f, basin, Angle::parse(angle), opt);
  ctx.doc = {{"basin", basin},
             {"angle", path.angle.str()},
             {"status", to_string(path.status)},
             {"note", path.note},
             {"endpoint", to_json(path.landing_estimate)},
             {"samples", samples_json(path)}};
  ctx.text << "status " << to_string(path.status);
  if (!path.note.empty()) ctx.text << " (" << path.note << ")";
  ctx.text << "\nsamples " << path.samples.size() << ", endpoint " << format_point(path.landing_estimate, 12) << "\n";
  int code = path.status == RayStatus::BasinViolation ? Numerical : Ok;
  if (land && path.status == RayStatus::Ok) {
    const auto L = landing_point(f, path);
    ctx.doc["landing"] = {{"point", to_json(L.point)},
                          {"converged", L.converged},
                          {"final_gap", L.final_gap},
                          {"endpoint_gaps", L.endpoint_gaps},
                          {"note", L.note}};
    ctx.text << "lands at " << format_point(L.point, 12) << (L.converged ? " (converged)" : " (not converged)") << "\n";
    if (!L.converged) code = Numerical;
  }
  return code;
}

int run_param_ray(Context& ctx, int basin, const std::string& angle, double rmax) {
  const auto path = trace_parameter_ray(basin, Angle::parse(angle), rmax);
  ctx.doc = {{"basin", basin},
             {"angle", path.angle.str()},
             {"status", to_string(path.status)},
             {"note", path.note},
             {"endpoint", to_json(path.landing_estimate)},
             {"samples", samples_json(path)}};
  ctx.text << "status " << to_string(path.status) << ", samples " << path.samples.size() << ", endpoint "
           << format_point(path.landing_estimate, 15) << "\n";
  return path.status == RayStatus::Ok ? Ok : Numerical;
}

int run_head_angle(Context& ctx, const std::string& lambda, double width) {
  const auto br = head_angle(Parameter(parse_complex(lambda)), width);
  json ev = json::array();
  for (const auto& p : br.evidence) {
    ev.push_back({{"angle", p.angle.str()}, {"co_land", p.co_land}, {"bifurcated", p.bifurcated}, {"distance", p.distance}});
    ctx.text << "  " << p.angle.str() << "\t" << (p.co_land ? "co-land" : "apart") << "\t" << p.distance << "\n";
  }
  ctx.doc = {{"lo", br.lo.str()}, {"hi", br.hi.str()}, {"pinched_to_gap", br.pinched_to_gap}, {"capped", br.capped}, {"evidence", ev}};
  std::ostringstream head;
  head << "head angle in [" << br.lo.str() << ", " << br.hi.str() << "]";
  if (br.pinched_to_gap) head << " (gap)";
  if (br.capped) head << " (capped)";
  ctx.text.str(head.str() + "\n" + ctx.text.str());
  return br.capped ? Numerical : Ok;
}

struct RenderArgs {
  std::string lower_left = "-1.5-1.5i", upper_right = "1.5+1.5i", out = "out.ppm", lambda;
  int width = 256, height = 256;
  std::vector<std::string> rays, marks;
};

int run_render(Context& ctx, const RenderArgs& a, PlaneKind plane) {
  RenderSpec spec;
  spec.plane = plane;
  spec.lower_left = parse_complex(a.lower_left);
  spec.upper_right = parse_complex(a.upper_right);
  spec.width = a.width;
  spec.height = a.height;
  spec.threads = ctx.threads;
  if (plane == PlaneKind::Dynamical) spec.lambda = parse_complex(a.lambda);
  for (const auto& r : a.rays) {
    const auto colon = r.find(':');
    if (colon == std::string::npos) throw domain_error("ray overlay must be basin:p/q");
    spec.rays.push_back({std::stoi(r.substr(0, colon)), Angle::parse(r.substr(colon + 1))});
  }
  for (const auto& m : a.marks) spec.marks.push_back(parse_complex(m));
  const auto res = plane == PlaneKind::Parameter ? render_parameter_plane(spec) : render_dynamical_plane(spec);
  write_ppm(res.image, a.out);
  ctx.doc = {{"output", a.out}, {"width", spec.width}, {"height", spec.height}, {"threads", resolve_threads(spec.threads)},
             {"warnings", res.warnings}};
  ctx.text << "wrote " << a.out << " (" << spec.width << "x" << spec.height << ")\n";
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cubic Newton family: classification, rays, angles and pictures"};
  app.require_subcommand(1);
  Context ctx;
  app.add_flag("--json", ctx.as_json, "emit one JSON document");
  app.add_option("--threads", ctx.threads, "render worker count")->check(CLI::PositiveNumber);

  std::string lambda, angle, method = "descent";
  int basin = 1, resolution = 1024, gap_n = 6;
  long long spot = 0;
  double smax = 1.0 - 1e-4, rmax = 0.99, width = 1e-3;
  bool land = false;
  RenderArgs ra;
  std::function<int()> action;

  auto* c = app.add_subcommand("classify", "classify the free critical orbit");
  c->add_option("--lambda", lambda, "parameter a+bi")->required();
  c->add_option("--method", method, "capture test: descent or grid");
  c->add_option("--resolution", resolution, "grid resolution");
  c->callback([&] { action = [&] { return run_classify(ctx, lambda, method, resolution); }; });

  auto* o = app.add_subcommand("orbit", "symmetry orbit of a parameter");
  o->add_option("--lambda", lambda)->required();
  o->callback([&] { action = [&] { return run_orbit(ctx, lambda); }; });

  auto* r = app.add_subcommand("reduce", "reduce to the fundamental domain");
  r->add_option("--lambda", lambda)->required();
  r->callback([&] { action = [&] { return run_reduce(ctx, lambda); }; });

  auto* x = app.add_subcommand("xi", "membership of an angle in Xi");
  x->add_option("angle", angle, "p/q")->required();
  x->callback([&] { action = [&] { return run_xi(ctx, angle); }; });

  auto* g = app.add_subcommand("gaps", "gap intervals of Xi up to level n");
  g->add_option("--n", gap_n)->check(CLI::Range(2, 24));
  g->add_option("--spot-den", spot, "largest denominator for the interior spot check");
  g->callback([&] { action = [&] { return run_gaps(ctx, gap_n, spot); }; });

  auto* ac = app.add_subcommand("angle-class", "doubling-orbit type of an angle");
  ac->add_option("angle", angle, "p/q")->required();
  ac->callback([&] { action = [&] { return run_angle_class(ctx, angle); }; });

  auto* ry = app.add_subcommand("ray", "trace an internal ray");
  ry->add_option("--lambda", lambda)->required();
  ry->add_option("--basin", basin)->required()->check(CLI::Range(1, 3));
  ry->add_option("--angle", angle)->required();
  ry->add_option("--smax", smax, "largest potential");
  ry->add_flag("--land", land, "compute the landing point");
  ry->callback([&] { action = [&] { return run_ray(ctx, lambda, basin, angle, land, smax); }; });

  auto* pr = app.add_subcommand("param-ray", "trace a parameter ray");
  pr->add_option("--basin", basin)->required()->check(CLI::Range(1, 2));
  pr->add_option("--angle", angle)->required();
  pr->add_option("--rmax", rmax);
  pr->callback([&] { action = [&] { return run_param_ray(ctx, basin, angle, rmax); }; });

  auto* h = app.add_subcommand("head-angle", "bracket the head angle");
  h->add_option("--lambda", lambda)->required();
  h->add_option("--width", width, "target bracket width");
  h->callback([&] { action = [&] { return run_head_angle(ctx, lambda, width); }; });

  auto add_render = [&](const char* name, const char* help, PlaneKind plane) {
    auto* s = app.add_subcommand(name, help);
    if (plane == PlaneKind::Dynamical) s->add_option("--lambda", ra.lambda)->required();
    s->add_option("--lower-left", ra.lower_left);
    s->add_option("--upper-right", ra.upper_right);
    s->add_option("--width", ra.width);
    s->add_option("--height", ra.height);
    s->add_option("--out", ra.out, "P6 output path");
    s->add_option("--mark", ra.marks, "marked point a+bi");
    if (plane == PlaneKind::Dynamical) s->add_option("--ray", ra.rays, "overlay basin:p/q");
    s->callback([&, plane] { action = [&, plane] { return run_render(ctx, ra, plane); }; });
  };
  add_render("render-param", "render the parameter plane", PlaneKind::Parameter);
  add_render("render-dyn", "render a dynamical plane", PlaneKind::Dynamical);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return Usage;
  }

  int code = Ok;
  std::string error;
  try {
    code = action();
  } catch (const domain_error& e) {
    code = Domain;
    error = e.what();
  } catch (const numerical_failure& e) {
    code = Numerical;
    error = e.what();
  } catch (const std::bad_alloc&) {
    code = Domain;
    error = "allocation failed";
  }
  if (!error.empty()) {
    std::cerr << "error: " << error << "\n";
    if (ctx.as_json) std::cout << json{{"error", error}, {"exit_code", code}}.dump(2) << "\n";
    return code;
  }
  if (ctx.as_json) std::cout << ctx.doc.dump(2) << "\n";
  else std::cout << ctx.text.str();
  return code;
}
