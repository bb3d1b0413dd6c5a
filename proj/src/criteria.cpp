#include "zamr/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zamr {

void Criterion::validate() const {
  if (!(xi > 0.0)) throw ConfigError("refinement threshold xi must be positive");
  if (kind == CriterionKind::Mixed) {
    const bool any = std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
    const bool neg = std::any_of(weights.begin(), weights.end(), [](double w) { return w < 0.0; });
    if (neg || !any) throw ConfigError("mixed criterion weights must be >= 0 and not all zero");
  }
}

CriterionKind parse_criterion_kind(std::string_view name) {
  if (name == "alpha_gradient" || name == "alpha") return CriterionKind::AlphaGradient;
  if (name == "rho_gradient" || name == "rho") return CriterionKind::RhoGradient;
  if (name == "mixed") return CriterionKind::Mixed;
  throw ConfigError("unknown criterion '" + std::string(name) + "'");
}

std::string_view criterion_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::AlphaGradient: return "alpha_gradient";
    case CriterionKind::Mixed: return "mixed";
    case CriterionKind::RhoGradient: return "rho_gradient";
  }
  return "unknown";
}

double relative_jump(double bi, std::span<const double> neighbors, double floor) {
  double d = 0.0;
  for (double bj : neighbors) {
    const double denom = std::max({bi, bj, floor});
    if (denom > 0.0) {
      d = std::max(d, std::abs(bi - bj) / denom);
    } else if (bi != bj) {
      d = std::max(d, std::abs(bi - bj) / std::max(std::abs(bi), std::abs(bj)));
    }
  }
  return d;
}

std::vector<double> evaluate(const Criterion& c, const Forest& f, const LeafAdjacency& adj, const FieldArray& u,
                             const Fluids& fp, const PartitionMap* pm) {
  if (u.size() != f.size()) throw ContractError("field size does not match the forest");
  const std::size_t n = f.size();

  // per-leaf scalars needed by the chosen criterion
  std::vector<double> rho(n), alpha, pressure, speed;
  const bool need_thermo = c.kind != CriterionKind::RhoGradient;
  if (need_thermo) {
    alpha.resize(n);
    pressure.resize(n);
    speed.resize(n);
  }
  const PartitionMap whole = partition(n, 1);
  const PartitionMap& parts = pm ? *pm : whole;

  for_each_rank(parts.ranks, [&](int r) {
    for (std::size_t i = parts.begin(r); i < parts.end(r); ++i) {
      rho[i] = u[i][kRho];
      if (need_thermo) {
        const Thermo<double> t = thermo(u[i], fp);
        alpha[i] = t.alpha;
        pressure[i] = t.pressure;
        speed[i] = velocity(u[i]).norm();
      }
    }
  });

  std::vector<double> values(n, 0.0);
  for_each_rank(parts.ranks, [&](int r) {
    std::vector<double> nb;
    auto gather = [&](const std::vector<double>& field, std::size_t i) -> std::span<const double> {
      nb.clear();
      for (std::size_t j : adj.of(i)) nb.push_back(field[j]);
      return nb;
    };
    for (std::size_t i = parts.begin(r); i < parts.end(r); ++i) {
      switch (c.kind) {
        case CriterionKind::AlphaGradient: {
          double m = 0.0;
          for (double aj : gather(alpha, i)) m = std::max(m, std::abs(alpha[i] - aj));
          values[i] = m;
          break;
        }
        case CriterionKind::RhoGradient:
          values[i] = relative_jump(rho[i], gather(rho, i));
          break;
        case CriterionKind::Mixed: {
          const double dr = relative_jump(rho[i], gather(rho, i));
          const double dp = relative_jump(pressure[i], gather(pressure, i));
          const double du = relative_jump(speed[i], gather(speed, i), kSpeedFloor);
          values[i] = std::max({c.weights[0] * dr, c.weights[1] * dp, c.weights[2] * du});
          break;
        }
      }
    }
  });
  return values;
}

std::vector<double> evaluate(const Criterion& c, const Forest& f, const FieldArray& u, const Fluids& fp) {
  return evaluate(c, f, build_adjacency(f), u, fp);
}

AdaptMarks mark(const Forest& f, std::span<const double> values, double xi, int min_level, int max_level) {
  if (values.size() != f.size()) throw ContractError("criterion values do not match the leaf count");
  const Lattice& lat = f.lattice();
  const std::size_t nc = static_cast<std::size_t>(lat.num_children());
  AdaptMarks marks(f.size(), Mark::Keep);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (values[i] > xi && f.leaf(i).level < max_level) marks[i] = Mark::Refine;
  }
  std::size_t i = 0;
  while (i < f.size()) {
    const Octant& o = f.leaf(i);
    bool group = o.level > min_level && child_id(lat, o) == 0 && i + nc <= f.size();
    for (std::size_t k = 0; group && k < nc; ++k) {
      group = f.leaf(i + k) == sibling(lat, o, static_cast<int>(k)) && values[i + k] <= xi;
    }
    if (group) {
      std::fill(marks.begin() + static_cast<std::ptrdiff_t>(i), marks.begin() + static_cast<std::ptrdiff_t>(i + nc),
                Mark::Coarsen);
      i += nc;
    } else {
      ++i;
    }
  }
  return marks;
}

FieldArray project_solution(const Forest& old_f, const Forest& new_f, const AdaptMap& map, const FieldArray& u_old) {
  if (map.size() != new_f.size() || u_old.size() != old_f.size()) {
    throw ContractError("adapt map does not match the forests");
  }
  FieldArray u(new_f.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const AdaptEntry& e = map[i];
    if (e.first + e.count > u_old.size()) throw ContractError("adapt map references a missing leaf");
    if (e.count == 1) {
      u[i] = u_old[e.first];
    } else {
      StateD sum = StateD::Zero();
      for (std::uint32_t k = 0; k < e.count; ++k) sum += u_old[e.first + k];
      u[i] = sum / static_cast<double>(e.count);
    }
  }
  return u;
}

}  // namespace zamr
