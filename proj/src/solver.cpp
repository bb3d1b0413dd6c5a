#include "zamr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zamr {
namespace {

using Matrix5 = Eigen::Matrix<double, kNumComponents, kNumComponents>;

Matrix5 make_rotation(int axis) {
  Matrix5 r = Matrix5::Zero();
  r(0, 0) = 1;
  r(1, 1) = 1;
  // row 2+k of R_q picks momentum component (axis + k) mod 3
  for (int k = 0; k < 3; ++k) r(2 + k, 2 + (axis + k) % 3) = 1;
  return r;
}

PrimitiveD mirror_primitive(PrimitiveD v, int axis) {
  v[2 + axis] = -v[2 + axis];
  return v;
}

/// Wall ghost of a face-normal state: normal momentum reversed.
FaceState<double> mirror_face(FaceState<double> s) {
  s.w[kMomX] = -s.w[kMomX];
  return s;
}

FieldArray add_gravity(FieldArray u, double tau, double g) {
  if (g == 0.0) return u;
  for (auto& w : u) w[kMomY] -= w[kRho] * g * tau;
  return u;
}

}  // namespace

void SweepConfig::validate() const {
  if (order != 1 && order != 2) throw ConfigError("scheme order must be 1 or 2");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("CFL number must lie in (0, 1]");
  if (!std::isfinite(gravity)) throw ConfigError("gravity must be finite");
}

const Matrix5& rotation(int axis) {
  static const std::array<Matrix5, 3> rotations{make_rotation(0), make_rotation(1), make_rotation(2)};
  return rotations.at(axis);
}

// ---------------------------------------------------------------------------
// MeshTopology

MeshTopology::MeshTopology(const Forest& forest, const PartitionMap& pm) : dim_(forest.dim()), pm_(pm) {
  const std::size_t n = forest.size();
  if (pm.offsets.empty() || pm.offsets.back() != n) throw ContractError("partition does not match the forest");
  dx_.resize(n);
  volume_.resize(n);
  level_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CellGeometry g = cell_geometry(forest, i);
    dx_[i] = g.dx;
    volume_[i] = g.volume;
    level_[i] = forest.leaf(i).level;
  }

  for (int axis = 0; axis < dim_; ++axis) {
    auto& faces = faces_[axis];
    Axis& ax = axes_[axis];
    ax.slope_offsets.assign(1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double wall_area = std::pow(dx_[i], dim_ - 1);
      const NeighborSet lo = leaf_neighbors(forest, i, axis, -1);
      const NeighborSet hi = leaf_neighbors(forest, i, axis, +1);
      if (lo.kind == NeighborSet::Kind::Boundary) {
        faces.push_back({kWall, i, wall_area});
        ax.slope.push_back({kWall, -dx_[i]});
      }
      for (const auto& nf : lo.span()) ax.slope.push_back({nf.leaf, -nf.distance});
      if (hi.kind == NeighborSet::Kind::Boundary) {
        faces.push_back({i, kWall, wall_area});
        ax.slope.push_back({kWall, dx_[i]});
      }
      for (const auto& nf : hi.span()) {
        faces.push_back({i, nf.leaf, nf.area});
        ax.slope.push_back({nf.leaf, nf.distance});
      }
      ax.slope_offsets.push_back(ax.slope.size());
    }

    // incidence lists in face order, so every cell accumulates in a fixed order
    std::vector<std::size_t> counts(n + 1, 0);
    for (const Face& f : faces) {
      if (f.low != kWall) ++counts[f.low + 1];
      if (f.high != kWall) ++counts[f.high + 1];
    }
    for (std::size_t i = 0; i < n; ++i) counts[i + 1] += counts[i];
    ax.inc_offsets = counts;
    ax.inc.resize(counts[n]);
    std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      const Face& f = faces[fi];
      if (f.low != kWall) ax.inc[fill[f.low]++] = {fi, true};
      if (f.high != kWall) ax.inc[fill[f.high]++] = {fi, false};
    }

    rank_faces_[axis].assign(pm.ranks, {});
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      rank_faces_[axis][pm.owner(faces[fi].owner())].push_back(fi);
    }
  }
}

std::span<const FaceIncidence> MeshTopology::incidences(int axis, std::size_t i) const {
  const Axis& ax = axes_[axis];
  return {ax.inc.data() + ax.inc_offsets[i], ax.inc_offsets[i + 1] - ax.inc_offsets[i]};
}

std::span<const SlopeNeighbor> MeshTopology::slope_neighbors(int axis, std::size_t i) const {
  const Axis& ax = axes_[axis];
  return {ax.slope.data() + ax.slope_offsets[i], ax.slope_offsets[i + 1] - ax.slope_offsets[i]};
}

// ---------------------------------------------------------------------------
// Time step

double compute_dt(const MeshTopology& topo, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp,
                  ProfileReport* prof) {
  ScopedPhase timer(prof, Phase::Eos);
  const PartitionMap& pm = topo.partition();
  // acoustic impedance rho c of every cell
  std::vector<double> impedance(u.size());
  for_each_rank(pm.ranks, [&](int r) {
    for (std::size_t i = pm.begin(r); i < pm.end(r); ++i) {
      impedance[i] = u[i][kRho] * thermo(u[i], fp).sound_speed;
    }
  });
  // a / rho_i with a = theta max(rho c) over the faces of cell i
  std::vector<double> rank_min(pm.ranks, std::numeric_limits<double>::infinity());
  for_each_rank(pm.ranks, [&](int r) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = pm.begin(r); i < pm.end(r); ++i) {
      double z = impedance[i];
      for (int axis = 0; axis < topo.dim(); ++axis) {
        for (const FaceIncidence& inc : topo.incidences(axis, i)) {
          const Face& f = topo.faces(axis)[inc.face];
          const std::size_t j = inc.low_side ? f.high : f.low;
          if (j != kWall) z = std::max(z, impedance[j]);
        }
      }
      const double speed = velocity(u[i]).norm() + fp.theta * z / u[i][kRho];
      if (!std::isfinite(speed)) throw NumericError("non-finite wave speed at leaf " + std::to_string(i));
      m = std::min(m, topo.dx(i) / speed);
    }
    rank_min[r] = m;
  });
  double m = std::numeric_limits<double>::infinity();
  for (double v : rank_min) m = std::min(m, v);
  return cfg.cfl * m;
}

double compute_dt(const Forest& f, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp) {
  return compute_dt(MeshTopology(f, partition(f, 1)), u, cfg, fp);
}

// ---------------------------------------------------------------------------
// Reconstruction

PrimitiveD compute_slope(const MeshTopology& topo, const FieldArray& u, std::size_t i, int axis) {
  const PrimitiveD vi = to_primitive(u[i]);
  PrimitiveD min_abs = PrimitiveD::Constant(std::numeric_limits<double>::infinity());
  Eigen::Array<bool, kNumComponents, 1> all_pos = Eigen::Array<bool, kNumComponents, 1>::Constant(true);
  Eigen::Array<bool, kNumComponents, 1> all_neg = Eigen::Array<bool, kNumComponents, 1>::Constant(true);
  for (const SlopeNeighbor& nb : topo.slope_neighbors(axis, i)) {
    const PrimitiveD vj = nb.leaf == kWall ? mirror_primitive(vi, axis) : to_primitive(u[nb.leaf]);
    const PrimitiveD s = (vj - vi) / nb.distance;
    for (int k = 0; k < kNumComponents; ++k) {
      all_pos[k] = all_pos[k] && s[k] > 0.0;
      all_neg[k] = all_neg[k] && s[k] < 0.0;
      min_abs[k] = std::min(min_abs[k], std::abs(s[k]));
    }
  }
  PrimitiveD sigma = PrimitiveD::Zero();
  for (int k = 0; k < kNumComponents; ++k) {
    if (all_pos[k]) sigma[k] = min_abs[k];
    if (all_neg[k]) sigma[k] = -min_abs[k];
  }
  return sigma;
}

PrimitiveD compute_slope(const Forest& f, const FieldArray& u, std::size_t i, int axis) {
  return compute_slope(MeshTopology(f, partition(f, 1)), u, i, axis);
}

MusclPrediction muscl_predict(const StateD& w, const PrimitiveD& slope, double dx, double dt, const Fluids& fp) {
  const MusclPrediction first_order{w, w, true};
  if (slope.isZero(0.0)) return {w, w, false};
  const PrimitiveD v = to_primitive(w);
  const PrimitiveD vl = v - 0.5 * dx * slope;
  const PrimitiveD vr = v + 0.5 * dx * slope;
  if (vl[0] < 0.0 || vl[1] < 0.0 || vr[0] < 0.0 || vr[1] < 0.0) return first_order;
  const StateD wl = from_primitive(vl);
  const StateD wr = from_primitive(vr);
  if (!is_admissible(wl) || !is_admissible(wr)) return first_order;
  try {
    const StateD df = physical_flux(wr, mixture_pressure(wr[kRho], wr[kRhoY] / wr[kRho], fp)) -
                      physical_flux(wl, mixture_pressure(wl[kRho], wl[kRhoY] / wl[kRho], fp));
    MusclPrediction out{wl - 0.5 * dt / dx * df, wr - 0.5 * dt / dx * df, false};
    if (!is_admissible(out.left) || !is_admissible(out.right)) return first_order;
    return out;
  } catch (const NumericError&) {
    return first_order;
  }
}

// ---------------------------------------------------------------------------
// Sweeps

FieldArray sweep(const MeshTopology& topo, const FieldArray& u, int axis, double dt, const SweepConfig& cfg,
                 const Fluids& fp, SweepStats* stats, ProfileReport* prof) {
  const std::size_t n = topo.size();
  if (u.size() != n) throw ContractError("field size does not match the mesh");
  const PartitionMap& pm = topo.partition();
  const Matrix5& rot = rotation(axis);

  // face-normal states at the low (-q) and high (+q) face of every cell
  std::vector<FaceState<double>> low_face(n);
  std::vector<FaceState<double>> high_face(n);
  std::vector<std::size_t> fallbacks(pm.ranks, 0);

  if (cfg.order == 1) {
    ScopedPhase timer(prof, Phase::Eos);
    for_each_rank(pm.ranks, [&](int r) {
      for (std::size_t i = pm.begin(r); i < pm.end(r); ++i) {
        low_face[i] = make_face_state<double>(rot * u[i], fp);
        high_face[i] = low_face[i];
      }
    });
  } else {
    ScopedPhase timer(prof, Phase::Slopes);
    for_each_rank(pm.ranks, [&](int r) {
      for (std::size_t i = pm.begin(r); i < pm.end(r); ++i) {
        const PrimitiveD slope = rot * compute_slope(topo, u, i, axis);
        const MusclPrediction pred = muscl_predict(rot * u[i], slope, topo.dx(i), dt, fp);
        if (pred.fell_back) ++fallbacks[r];
        low_face[i] = make_face_state(pred.left, fp);
        high_face[i] = make_face_state(pred.right, fp);
      }
    });
  }
  if (stats) {
    for (std::size_t c : fallbacks) stats->muscl_fallbacks += c;
  }

  const auto faces = topo.faces(axis);
  std::vector<StateD> flux(faces.size());
  {
    ScopedPhase timer(prof, Phase::Flux);
    for_each_rank(pm.ranks, [&](int r) {
      for (std::size_t fi : topo.rank_faces(axis, r)) {
        const Face& f = faces[fi];
        const FaceState<double> left = f.low != kWall ? high_face[f.low] : mirror_face(low_face[f.high]);
        const FaceState<double> right = f.high != kWall ? low_face[f.high] : mirror_face(high_face[f.low]);
        try {
          flux[fi] = rot.transpose() * suliciu_flux(left, right, fp.theta);
        } catch (const RiemannError& e) {
          auto name = [](std::size_t c) { return c == kWall ? std::string("wall") : std::to_string(c); };
          throw SolverError("flux failure on axis " + std::to_string(axis) + " between leaf " + name(f.low) +
                            " and leaf " + name(f.high) + ": " + e.what());
        }
      }
    });
  }

  FieldArray out(n);
  {
    ScopedPhase timer(prof, Phase::Sweep);
    for_each_rank(pm.ranks, [&](int r) {
      for (std::size_t i = pm.begin(r); i < pm.end(r); ++i) {
        StateD acc = StateD::Zero();
        for (const FaceIncidence& inc : topo.incidences(axis, i)) {
          const double area = faces[inc.face].area;
          if (inc.low_side) {
            acc -= area * flux[inc.face];
          } else {
            acc += area * flux[inc.face];
          }
        }
        out[i] = u[i] + (dt / topo.volume(i)) * acc;
      }
    });
  }
  return out;
}

FieldArray sweep(const Forest& f, const FieldArray& u, int axis, double dt, const SweepConfig& cfg, const Fluids& fp,
                 const PartitionMap& pm) {
  return sweep(MeshTopology(f, pm), u, axis, dt, cfg, fp);
}

FieldArray gravity_op(const FieldArray& u, double dt, double g) { return add_gravity(u, 0.5 * dt, g); }

FieldArray advance(const MeshTopology& topo, const FieldArray& u, double dt, const SweepConfig& cfg, const Fluids& fp,
                   SweepStats* stats, ProfileReport* prof) {
  auto sw = [&](const FieldArray& v, int axis, double tau) { return sweep(topo, v, axis, tau, cfg, fp, stats, prof); };
  const int d = topo.dim();
  const bool gravity = cfg.gravity != 0.0;
  FieldArray v = u;

  if (cfg.splitting == Splitting::Lie) {
    for (int q = 0; q < d; ++q) v = sw(v, q, dt);
    if (gravity) {
      ScopedPhase timer(prof, Phase::Sweep);
      v = add_gravity(std::move(v), dt, cfg.gravity);
    }
    return v;
  }

  // Strang, rightmost operator first:
  //   X Y Z Z Y X                 without gravity
  //   X Y S Z Z Y S X             with gravity
  // each at dt/2; Z operators are absent in 2D.
  const double half = 0.5 * dt;
  auto source = [&](FieldArray w) {
    ScopedPhase timer(prof, Phase::Sweep);
    return gravity_op(w, dt, cfg.gravity);
  };
  v = sw(v, 0, half);
  if (gravity) v = source(std::move(v));
  v = sw(v, 1, half);
  if (d == 3) {
    v = sw(v, 2, half);
    v = sw(v, 2, half);
  }
  if (gravity) v = source(std::move(v));
  v = sw(v, 1, half);
  v = sw(v, 0, half);
  return v;
}

StepResult step(const MeshTopology& topo, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp,
                SweepStats* stats, ProfileReport* prof) {
  const double dt = compute_dt(topo, u, cfg, fp, prof);
  return {advance(topo, u, dt, cfg, fp, stats, prof), dt};
}

StepResult step(const Forest& f, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp,
                const PartitionMap& pm) {
  return step(MeshTopology(f, pm), u, cfg, fp);
}

}  // namespace zamr
