#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zamr/errors.hpp"
#include "zamr/harness.hpp"

namespace zamr {

namespace {

Point vec3(const std::vector<double>& v, const std::string& key, int dim) {
  if (v.size() < static_cast<std::size_t>(dim) || v.size() > 3) {
    throw ConfigError("case." + key + ": expected " + std::to_string(dim) + " components");
  }
  Point p{};
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

Velocity<double> to_velocity(const Point& p) { return {p[0], p[1], p[2]}; }

struct Advection {
  int dim;
  Point center;
  double lambda;
  bool smooth;
  double radius;  // disk radius, or inner radius of the smooth ring
  double width;   // smooth profile: cos^4(pi r / width)

  double operator()(const Point& x) const {
    const double r = distance(x, center, dim);
    if (!smooth) return r < radius ? 1.0 - lambda : lambda;
    if (r < radius) return lambda;
    const double c = std::cos(std::numbers::pi * r / width);
    return lambda + (1.0 - lambda) * c * c * c * c;
  }
};

Advection advection_profile(const RunConfig& cfg) {
  const int dim = cfg.domain.dim;
  const auto size = cfg.domain.domain_size();
  const std::vector<double> mid{size[0] / 2, size[1] / 2, size[2] / 2};
  Advection a{};
  a.dim = dim;
  a.center = vec3(cfg.param_vector("center", {mid.begin(), mid.begin() + dim}), "center", dim);
  a.lambda = cfg.param("lambda", 1e-7);
  a.smooth = cfg.case_name == "smooth_advection";
  a.radius = cfg.param("radius", a.smooth ? 0.3 : 0.1);
  a.width = cfg.param("width", 0.6);
  if (!(a.lambda > 0.0 && a.lambda < 0.5)) throw ConfigError("case.lambda must lie in (0, 0.5)");
  return a;
}

double wrap(double x, double length) {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  return r;
}

// Pressure of a hydrostatic column: gas above the surface at `level`, liquid below.
double hydrostatic(double y, double level, double p_surface, const Fluids& fp, double g) {
  if (y >= level) return p_surface - fp.fluid1.density(p_surface) * g * (y - level);
  return p_surface + fp.fluid2.density(p_surface) * g * (level - y);
}

}  // namespace

StateD state_from_y_pressure(double y, double p, const Velocity<double>& u, const Fluids& fp) {
  const double r1 = fp.fluid1.density(p);
  const double r2 = fp.fluid2.density(p);
  if (!(r1 > 0.0 && r2 > 0.0)) throw ConfigError("pressure gives a non-positive phase density");
  const double rho = 1.0 / (y / r1 + (1.0 - y) / r2);
  PrimitiveD v;
  v << rho * y, rho * (1.0 - y), u[0], u[1], u[2];
  return from_primitive(v);
}

InitialState initial_condition(const RunConfig& cfg) {
  const Fluids fp = cfg.fluids;
  const int dim = cfg.domain.dim;
  const std::string& name = cfg.case_name;

  if (name == "smooth_advection" || name == "disk_advection") {
    const Advection a = advection_profile(cfg);
    const double p = cfg.param("pressure", 1e5);
    const Velocity<double> u = to_velocity(vec3(cfg.param_vector("velocity", {1.0, 1.0, 1.0}), "velocity", dim));
    return [a, p, u, fp](const Point& x) { return state_from_alpha_pressure(a(x), p, u, fp); };
  }

  if (name == "shock_tube" || name == "double_rarefaction") {
    const bool tube = name == "shock_tube";
    const auto size = cfg.domain.domain_size();
    const double split = cfg.param("split", 0.5) * size[0];
    const double y = cfg.param("y", 0.5);
    const double pl = cfg.param("p_left", tube ? 2e5 : 1e5);
    const double pr = cfg.param("p_right", 1e5);
    const double ul = cfg.param("u_left", tube ? 0.0 : -1.0);
    const double ur = cfg.param("u_right", tube ? 0.0 : 1.0);
    if (!(y > 0.0 && y < 1.0)) throw ConfigError("case.y must lie in (0, 1)");
    const StateD left = state_from_y_pressure(y, pl, {ul, 0.0, 0.0}, fp);
    const StateD right = state_from_y_pressure(y, pr, {ur, 0.0, 0.0}, fp);
    return [=](const Point& x) { return x[0] < split ? left : right; };
  }

  if (name == "drop2d" || name == "dambreak3d") {
    const double g = cfg.scheme.gravity;
    const double lambda = cfg.param("lambda", 1e-6);
    const double p_surface = cfg.param("pressure", 1e5);
    const Velocity<double> rest{0.0, 0.0, 0.0};
    if (name == "drop2d") {
      if (dim != 2) throw ConfigError("drop2d needs a 2D domain");
      const double depth = cfg.param("pool_depth", 0.3);
      const Point center = vec3(cfg.param_vector("drop_center", {0.5, 0.65}), "drop_center", 2);
      const double radius = cfg.param("drop_radius", 0.1);
      const double speed = cfg.param("drop_speed", 0.0);
      return [=](const Point& x) {
        const double p = hydrostatic(x[1], depth, p_surface, fp, g);
        if (distance(x, center, 2) < radius) return state_from_alpha_pressure(lambda, p, {0.0, -speed, 0.0}, fp);
        return state_from_alpha_pressure(x[1] < depth ? lambda : 1.0 - lambda, p, rest, fp);
      };
    }
    if (dim != 3) throw ConfigError("dambreak3d needs a 3D domain");
    const auto size = cfg.domain.domain_size();
    const double width = cfg.param("column_width", 0.5) * size[0];
    const double height = cfg.param("column_height", 0.5) * size[1];
    return [=](const Point& x) {
      const bool liquid = x[0] < width && x[1] < height;
      const double p = liquid ? hydrostatic(x[1], height, p_surface, fp, g)
                              : p_surface - fp.fluid1.density(p_surface) * g * (x[1] - height);
      return state_from_alpha_pressure(liquid ? lambda : 1.0 - lambda, p, rest, fp);
    };
  }

  throw ConfigError("unknown case '" + name + "'");
}

std::optional<ExactAlpha> exact_alpha(const RunConfig& cfg) {
  if (cfg.case_name != "smooth_advection" && cfg.case_name != "disk_advection") return std::nullopt;
  const int dim = cfg.domain.dim;
  for (int k = 0; k < dim; ++k) {
    if (!cfg.domain.periodic[k]) return std::nullopt;
  }
  const Advection a = advection_profile(cfg);
  const Point u = vec3(cfg.param_vector("velocity", {1.0, 1.0, 1.0}), "velocity", dim);
  const auto size = cfg.domain.domain_size();
  return ExactAlpha([a, u, size, dim](const Point& x, double t) {
    Point y = x;
    for (int k = 0; k < dim; ++k) y[k] = wrap(x[k] - t * u[k], size[k]);
    return a(y);
  });
}

FieldArray sample(const Forest& f, const InitialState& ic) {
  FieldArray u(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) u[i] = ic(cell_geometry(f, i).center);
  return u;
}

AdaptResult adapt_once(const Forest& f, const LeafAdjacency& adj, const FieldArray& u, const RunConfig& cfg,
                       const PartitionMap* pm, ProfileReport* prof) {
  AdaptMarks marks;
  {
    ScopedPhase timer(prof, Phase::Mark);
    const std::vector<double> values = evaluate(cfg.criterion, f, adj, u, cfg.fluids, pm);
    marks = mark(f, values, cfg.criterion.xi, cfg.min_level, cfg.max_level);
  }
  Adapted refined{f, {}};
  AdaptMarks carried;
  {
    ScopedPhase timer(prof, Phase::Refine);
    refined = refine(f, marks);
    carried = carry_marks(refined.map, marks);
  }
  Adapted coarsened{f, {}};
  {
    ScopedPhase timer(prof, Phase::Coarsen);
    coarsened = coarsen(refined.forest, carried);
  }
  Adapted balanced{f, {}};
  {
    ScopedPhase timer(prof, Phase::Balance);
    balanced = balance(coarsened.forest);
  }
  ScopedPhase timer(prof, Phase::Refine);
  const AdaptMap map = compose(compose(refined.map, coarsened.map), balanced.map);
  const bool changed = !(balanced.forest == f);
  FieldArray projected = changed ? project_solution(f, balanced.forest, map, u) : u;
  return {std::move(balanced.forest), std::move(projected), changed};
}

CaseSetup init_case(const RunConfig& cfg) {
  cfg.validate();
  const InitialState ic = initial_condition(cfg);
  if (!cfg.adapt) {
    Forest f = Forest::uniform(cfg.domain, cfg.max_level, cfg.lattice(), cfg.min_level);
    FieldArray u = sample(f, ic);
    return {std::move(f), std::move(u)};
  }
  // Sample on the finest mesh and coarsen to a fixed point, so that features
  // smaller than a coarse cell are never missed. Coarse cells keep fine-sample means.
  Forest f = Forest::uniform(cfg.domain, cfg.max_level, cfg.lattice(), cfg.min_level);
  FieldArray u = sample(f, ic);
  for (int round = 0; round < cfg.max_level - cfg.min_level; ++round) {
    const std::vector<double> values = evaluate(cfg.criterion, f, build_adjacency(f), u, cfg.fluids);
    AdaptMarks marks = mark(f, values, cfg.criterion.xi, cfg.min_level, cfg.max_level);
    std::replace(marks.begin(), marks.end(), Mark::Refine, Mark::Keep);
    const Adapted coarsened = coarsen(f, marks);
    if (coarsened.forest == f) break;
    const Adapted balanced = balance(coarsened.forest);
    const AdaptMap map = compose(coarsened.map, balanced.map);
    u = project_solution(f, balanced.forest, map, u);
    f = balanced.forest;
  }
  return {std::move(f), std::move(u)};
}

double compression_rate(const Forest& f, int max_level) {
  const double per_tree = std::ldexp(1.0, f.dim() * max_level);
  return static_cast<double>(f.size()) / (f.connectivity().num_trees() * per_tree);
}

}  // namespace zamr
