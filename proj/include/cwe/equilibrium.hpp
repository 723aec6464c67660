#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cwe/cost_operator.hpp"
#include "cwe/game_model.hpp"
#include "cwe/types.hpp"

namespace cwe {

using VectorField = std::function<Vector(const Vector&)>;

/// VI(F, H): find h* in H with (h - h*)' F(h*) >= 0 for all h in H.
struct ViProblem {
  VectorField op;
  FeasibleSet feasible;
};

struct FixedStep {
  double tau = 1e-3;
};

/// Step tau is accepted when tau ||F(y) - F(h)|| <= ratio ||y - h||;
/// otherwise tau *= shrink and the prediction is redone. After each accepted
/// step tau *= growth.
struct AdaptiveStep {
  double initial = 1.0;
  double shrink = 0.5;
  double growth = 1.1;
  double ratio = 0.9;
};

using StepRule = std::variant<FixedStep, AdaptiveStep>;

struct SolverConfig {
  int max_iters = 100'000;
  double residual_tol = 1e-8;
  std::optional<FlowVector> initial_point;  // default: uniform split per OD pair
  StepRule step = AdaptiveStep{};
  // Early stop when the best residual improves by less than stall_improvement
  // over stall_window consecutive iterations.
  int stall_window = 500;
  double stall_improvement = 1e-12;
  bool record_trace = true;
};

/// Throws DomainError for a non-positive tolerance, max_iters < 1 or a bad step rule.
void validate_config(const SolverConfig& cfg);

struct EquilibriumResult {
  FlowVector flow;
  double residual = 0.0;
  int iterations = 0;
  Vector path_risks;  // operator at `flow`
  bool converged = false;
  std::vector<double> trace;  // residual after each iteration, starting with the initial point
  std::string diagnostic;
};

/// ||h - project(h - F(h))||
double natural_residual(const ViProblem& prob, const Eigen::Ref<const Vector>& h);

/// Extragradient iteration
///   y  = project(h - tau F(h)),  h+ = project(h - tau F(y))
/// until the natural residual drops to residual_tol, max_iters is reached or
/// progress stalls. Throws NumericalError if the operator returns NaN/inf.
EquilibriumResult solve(const ViProblem& prob, const SolverConfig& cfg = {});

struct WardropReport {
  bool satisfied = true;
  std::vector<double> max_violation;  // per OD pair, >= 0
  std::vector<double> min_cost;       // per OD pair
};

/// Every path with flow above flow_tol_rel * d_w must have cost within `tol`
/// of the cheapest path of its OD pair.
WardropReport check_wardrop(const FeasibleSet& fs, const Vector& costs, const Eigen::Ref<const Vector>& h,
                            double tol, double flow_tol_rel = 1e-6);
WardropReport check_wardrop(const GameSpec& spec, const CostOperator& op, const Eigen::Ref<const Vector>& h,
                            double tol, double flow_tol_rel = 1e-6);

struct MonotonicityReport {
  bool monotone = false;
  double min_eigenvalue = 0.0;  // of (A + A') / 2
};

MonotonicityReport check_monotonicity_affine(const Matrix& A);
MonotonicityReport check_monotonicity_affine(const AffineAdditive& model);

}  // namespace cwe
