#pragma once

// Dimensionally split finite-volume update on a balanced forest.
//
// One sweep along axis q applies
//   W_i <- W_i - dt/|K_i| sum_j |Gamma_ij| (e_q . n_ij) R_q^-1 Phi(R_q W_i, R_q W_j)
// with every face flux evaluated once. Sweeps run rank by rank: a rank reads the
// previous field (owned cells plus ghosts) and writes only the cells it owns.

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <span>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "zamr/eos.hpp"
#include "zamr/forest.hpp"
#include "zamr/partition.hpp"
#include "zamr/profile.hpp"
#include "zamr/riemann.hpp"

namespace zamr {

using StateD = State<double>;
using PrimitiveD = Primitive<double>;
using Fluids = FluidPair<double>;
using FieldArray = std::vector<StateD>;

enum class Splitting { Lie, Strang };

struct SweepConfig {
  int order = 1;
  double cfl = 0.9;
  double gravity = 0.0;  // m/s^2, acts along -y
  Splitting splitting = Splitting::Lie;

  void validate() const;
};

/// Flux failure located at a face.
class SolverError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// R_q from the rotational invariance F_q(W) = R_q^-1 F_x(R_q W).
const Eigen::Matrix<double, kNumComponents, kNumComponents>& rotation(int axis);

inline constexpr std::size_t kWall = std::numeric_limits<std::size_t>::max();

struct Face {
  std::size_t low = kWall;   // cell on the -q side
  std::size_t high = kWall;  // cell on the +q side
  double area = 0.0;

  /// Lower z-order index of the adjacent cells; that cell's rank evaluates the face.
  std::size_t owner() const { return low < high ? low : high; }
};

struct FaceIncidence {
  std::size_t face = 0;
  bool low_side = true;  // the cell is Face::low
};

struct SlopeNeighbor {
  std::size_t leaf = kWall;  // kWall: mirrored wall ghost
  double distance = 0.0;     // (M_j - M_i) . e_q
};

/// Face lists, incidences and slope stencils for one forest and partition.
class MeshTopology {
 public:
  MeshTopology(const Forest& forest, const PartitionMap& pm);

  int dim() const { return dim_; }
  std::size_t size() const { return dx_.size(); }
  const PartitionMap& partition() const { return pm_; }
  double dx(std::size_t i) const { return dx_[i]; }
  double volume(std::size_t i) const { return volume_[i]; }
  int level(std::size_t i) const { return level_[i]; }

  std::span<const Face> faces(int axis) const { return faces_[axis]; }
  std::span<const FaceIncidence> incidences(int axis, std::size_t i) const;
  std::span<const SlopeNeighbor> slope_neighbors(int axis, std::size_t i) const;
  std::span<const std::size_t> rank_faces(int axis, int rank) const { return rank_faces_[axis][rank]; }

 private:
  struct Axis {
    std::vector<std::size_t> inc_offsets;
    std::vector<FaceIncidence> inc;
    std::vector<std::size_t> slope_offsets;
    std::vector<SlopeNeighbor> slope;
  };

  int dim_ = 2;
  PartitionMap pm_;
  std::vector<double> dx_;
  std::vector<double> volume_;
  std::vector<int> level_;
  std::array<std::vector<Face>, 3> faces_;
  std::array<Axis, 3> axes_;
  std::array<std::vector<std::vector<std::size_t>>, 3> rank_faces_;
};

/// Counters gathered over sweeps.
struct SweepStats {
  std::size_t muscl_fallbacks = 0;
};

/// Runs fn(rank) for every rank of the partition; ranks execute concurrently
/// when there is more than one, and the call returns after all of them finish.
template <class Fn>
void for_each_rank(int ranks, Fn&& fn);

/// dt = C min_i dx_i / (|u_i| + a_i / rho_i), where a_i = theta max(rho c) over
/// cell i and its face neighbors. Reduced rank by rank in leaf order.
double compute_dt(const MeshTopology& topo, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp,
                  ProfileReport* prof = nullptr);
double compute_dt(const Forest& f, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp);

/// Minmod slope of the primitive variables along `axis`, in the global frame.
PrimitiveD compute_slope(const MeshTopology& topo, const FieldArray& u, std::size_t i, int axis);
PrimitiveD compute_slope(const Forest& f, const FieldArray& u, std::size_t i, int axis);

struct MusclPrediction {
  StateD left;   // W_iL^{n+1/2}
  StateD right;  // W_iR^{n+1/2}
  bool fell_back = false;
};

/// Half-step MUSCL-Hancock prediction in the face-normal frame. Falls back to
/// the cell average when a reconstructed or predicted state is inadmissible.
MusclPrediction muscl_predict(const StateD& w, const PrimitiveD& slope, double dx, double dt, const Fluids& fp);

FieldArray sweep(const MeshTopology& topo, const FieldArray& u, int axis, double dt, const SweepConfig& cfg,
                 const Fluids& fp, SweepStats* stats = nullptr, ProfileReport* prof = nullptr);
FieldArray sweep(const Forest& f, const FieldArray& u, int axis, double dt, const SweepConfig& cfg, const Fluids& fp,
                 const PartitionMap& pm);

/// Half-step gravity operator: rho u_y -= rho g dt / 2.
FieldArray gravity_op(const FieldArray& u, double dt, double g);

/// Applies the splitting sequence for a given dt.
FieldArray advance(const MeshTopology& topo, const FieldArray& u, double dt, const SweepConfig& cfg, const Fluids& fp,
                   SweepStats* stats = nullptr, ProfileReport* prof = nullptr);

struct StepResult {
  FieldArray u;
  double dt = 0.0;
};

StepResult step(const MeshTopology& topo, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp,
                SweepStats* stats = nullptr, ProfileReport* prof = nullptr);
StepResult step(const Forest& f, const FieldArray& u, const SweepConfig& cfg, const Fluids& fp,
                const PartitionMap& pm);

}  // namespace zamr

#include "zamr/detail/rank_pool.hpp"
