#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwe/cost_risk.hpp"
#include "cwe/types.hpp"
#include "cwe/uncertainty.hpp"

namespace cwe {

struct OdPair {
  std::string id;
  double demand = 0.0;
};

struct Path {
  std::string id;
  std::string od;  // id of the owning OD pair
};

/// Routing game with uncertain costs, at path granularity. Path i owns flow
/// coordinate i.
struct GameSpec {
  std::vector<OdPair> od_pairs;
  std::vector<Path> paths;
  CostModel cost;
  UncertaintyModel uncertainty;
  double alpha = 0.5;

  Eigen::Index num_paths() const noexcept { return static_cast<Eigen::Index>(paths.size()); }
};

struct Violation {
  std::string locus;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks every structural invariant of the spec, plus nonnegativity of the
/// costs over H x U. Never throws for malformed content.
ValidationReport validate_spec(const GameSpec& spec);

// Tolerances for the feasible set H.
inline constexpr double kDemandTol = 1e-9;
inline constexpr double kNonnegTol = 1e-12;

struct FeasibilityReport {
  bool feasible = false;
  double max_violation = 0.0;
};

/// H = product over OD pairs w of {y >= 0, sum y = d_w} on the paths of w.
class FeasibleSet {
 public:
  FeasibleSet() = default;
  /// groups[w] lists the path indices of OD pair w; together they must
  /// partition [0, num_paths). Throws DomainError otherwise.
  FeasibleSet(std::vector<std::vector<Eigen::Index>> groups, Vector demands);

  /// Throws DomainError when the spec's path/OD references are broken.
  static FeasibleSet from_spec(const GameSpec& spec);

  Eigen::Index num_paths() const noexcept { return num_paths_; }
  std::size_t num_groups() const noexcept { return groups_.size(); }
  const std::vector<std::vector<Eigen::Index>>& groups() const noexcept { return groups_; }
  const Vector& demands() const noexcept { return demands_; }
  /// OD pair owning each path.
  const std::vector<std::size_t>& group_of() const noexcept { return group_of_; }

  /// d_w / |P_w| on every path.
  FlowVector uniform_split() const;

  /// Number of vertices of H (product of path counts); saturates at UINT64_MAX.
  std::uint64_t vertex_count() const noexcept;

  /// Vertex number `index` in mixed radix over the OD pairs (first group fastest).
  FlowVector vertex(std::uint64_t index) const;

 private:
  std::vector<std::vector<Eigen::Index>> groups_;
  std::vector<std::size_t> group_of_;
  Vector demands_;
  Eigen::Index num_paths_ = 0;
};

/// Throws DimensionError when h has the wrong length.
FeasibilityReport is_feasible(const Eigen::Ref<const Vector>& h, const FeasibleSet& fs);

/// Euclidean projection onto H (one sort-based simplex projection per OD pair).
/// Throws DimensionError when x has the wrong length.
FlowVector project(const Eigen::Ref<const Vector>& x, const FeasibleSet& fs);

/// Euclidean projection of x onto {y >= 0, sum y = demand}.
Vector project_simplex(const Eigen::Ref<const Vector>& x, double demand);

/// sup ||h - h'|| over H: sqrt(sum_w 2 d_w^2), over OD pairs with two or more paths.
double diameter(const FeasibleSet& fs);

/// Extremes of C_p(h, u) over paths, vertices of H and support vertices of U.
struct CostRange {
  double min = 0.0;
  double max = 0.0;
  bool sampled = false;  // vertex cap exceeded; values come from random vertices
  std::uint64_t evaluated = 0;
};

inline constexpr std::uint64_t kVertexCap = 1'000'000;
inline constexpr std::uint64_t kSampledVertexPairs = 100'000;

/// Throws DomainError if the spec structure is invalid.
CostRange cost_extrema(const GameSpec& spec);

}  // namespace cwe
