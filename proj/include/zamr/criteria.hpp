#pragma once

// Refinement criteria, threshold marking and solution transfer across adapt events.

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "zamr/forest.hpp"
#include "zamr/solver.hpp"

namespace zamr {

enum class CriterionKind { AlphaGradient, Mixed, RhoGradient };

struct Criterion {
  CriterionKind kind = CriterionKind::RhoGradient;
  double xi = 5e-5;
  std::array<double, 3> weights{1.0, 1.0, 1.0};  // Mixed: (a, b, c) for D(rho), D(p), D(u)

  void validate() const;
};

CriterionKind parse_criterion_kind(std::string_view name);
std::string_view criterion_name(CriterionKind kind);

/// Denominator floor for the speed jump near rest states (m/s).
inline constexpr double kSpeedFloor = 1e-8;

/// max_j |b_i - b_j| / max(b_i, b_j, floor) over the given neighbor values.
double relative_jump(double bi, std::span<const double> neighbors, double floor = 0.0);

/// Per-leaf criterion value C(W)_i over every face neighbor (fine sub-neighbors individually).
std::vector<double> evaluate(const Criterion& c, const Forest& f, const LeafAdjacency& adj, const FieldArray& u,
                             const Fluids& fp, const PartitionMap* pm = nullptr);
std::vector<double> evaluate(const Criterion& c, const Forest& f, const FieldArray& u, const Fluids& fp);

/// Refine where value > xi and level < max_level; coarsen whole sibling groups
/// whose values are all <= xi and whose level exceeds min_level.
AdaptMarks mark(const Forest& f, std::span<const double> values, double xi, int min_level, int max_level);

/// Children copy their parent's state; a merged parent takes the mean of its children.
FieldArray project_solution(const Forest& old_f, const Forest& new_f, const AdaptMap& map, const FieldArray& u_old);

}  // namespace zamr
