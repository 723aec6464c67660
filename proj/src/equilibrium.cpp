#include "cwe/equilibrium.hpp"

#include <cmath>
#include <limits>

namespace cwe {

namespace {

Vector evaluate(const ViProblem& prob, const Vector& h) {
  Vector f = prob.op(h);
  if (f.size() != h.size())
    throw DimensionError("operator returned " + std::to_string(f.size()) + " values for " +
                         std::to_string(h.size()) + " paths");
  if (!f.allFinite()) throw NumericalError("operator returned a non-finite value");
  return f;
}

double residual_of(const ViProblem& prob, const Vector& h, const Vector& f) {
  return (h - project(h - f, prob.feasible)).norm();
}

}  // namespace

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.residual_tol > 0.0)) throw DomainError("solver: residual_tol must be > 0");
  if (cfg.max_iters < 1) throw DomainError("solver: max_iters must be >= 1");
  if (cfg.stall_window < 1) throw DomainError("solver: stall_window must be >= 1");
  if (const auto* fixed = std::get_if<FixedStep>(&cfg.step); fixed != nullptr && !(fixed->tau > 0.0))
    throw DomainError("solver: fixed step must be > 0");
  if (const auto* a = std::get_if<AdaptiveStep>(&cfg.step)) {
    if (!(a->initial > 0.0) || !(a->shrink > 0.0 && a->shrink < 1.0) || !(a->growth >= 1.0) ||
        !(a->ratio > 0.0 && a->ratio < 1.0))
      throw DomainError("solver: invalid adaptive step parameters");
  }
}

double natural_residual(const ViProblem& prob, const Eigen::Ref<const Vector>& h) {
  const Vector x = h;
  return residual_of(prob, x, evaluate(prob, x));
}

EquilibriumResult solve(const ViProblem& prob, const SolverConfig& cfg) {
  validate_config(cfg);
  const FeasibleSet& fs = prob.feasible;

  EquilibriumResult result;
  Vector h = cfg.initial_point ? project(*cfg.initial_point, fs) : fs.uniform_split();
  Vector fh = evaluate(prob, h);
  double residual = residual_of(prob, h, fh);
  if (cfg.record_trace) result.trace.push_back(residual);

  const auto* adaptive = std::get_if<AdaptiveStep>(&cfg.step);
  double tau = adaptive ? adaptive->initial : std::get<FixedStep>(cfg.step).tau;
  double best = residual;
  int last_improvement = 0;
  int it = 0;

  while (residual > cfg.residual_tol && it < cfg.max_iters) {
    ++it;
    Vector y;
    Vector fy;
    for (;;) {
      y = project(h - tau * fh, fs);
      fy = evaluate(prob, y);
      if (!adaptive) break;
      const double move = (y - h).norm();
      if (move == 0.0 || tau * (fy - fh).norm() <= adaptive->ratio * move) break;
      tau *= adaptive->shrink;
      if (tau < std::numeric_limits<double>::min()) throw NumericalError("solver: step size underflow");
    }
    h = project(h - tau * fy, fs);
    fh = evaluate(prob, h);
    residual = residual_of(prob, h, fh);
    if (cfg.record_trace) result.trace.push_back(residual);
    if (adaptive) tau *= adaptive->growth;

    if (residual < best - cfg.stall_improvement) {
      best = residual;
      last_improvement = it;
    } else if (it - last_improvement >= cfg.stall_window) {
      result.diagnostic = "stalled: residual improved by less than " + std::to_string(cfg.stall_improvement) +
                          " over " + std::to_string(cfg.stall_window) + " iterations";
      break;
    }
  }

  result.flow = std::move(h);
  result.path_risks = std::move(fh);
  result.residual = residual;
  result.iterations = it;
  result.converged = residual <= cfg.residual_tol;
  if (!result.converged && result.diagnostic.empty())
    result.diagnostic = "max_iters (" + std::to_string(cfg.max_iters) + ") reached";
  return result;
}

WardropReport check_wardrop(const FeasibleSet& fs, const Vector& costs, const Eigen::Ref<const Vector>& h,
                            double tol, double flow_tol_rel) {
  if (h.size() != fs.num_paths() || costs.size() != fs.num_paths())
    throw DimensionError("check_wardrop: dimension mismatch");
  WardropReport report;
  report.max_violation.assign(fs.num_groups(), 0.0);
  report.min_cost.assign(fs.num_groups(), 0.0);
  for (std::size_t w = 0; w < fs.num_groups(); ++w) {
    const auto& g = fs.groups()[w];
    double mu = std::numeric_limits<double>::infinity();
    for (Eigen::Index p : g) mu = std::min(mu, costs[p]);
    report.min_cost[w] = mu;
    const double flow_tol = flow_tol_rel * fs.demands()[static_cast<Eigen::Index>(w)];
    for (Eigen::Index p : g) {
      if (h[p] <= flow_tol) continue;
      const double gap = costs[p] - mu;
      report.max_violation[w] = std::max(report.max_violation[w], gap);
      if (gap > tol) report.satisfied = false;
    }
  }
  return report;
}

WardropReport check_wardrop(const GameSpec& spec, const CostOperator& op, const Eigen::Ref<const Vector>& h,
                            double tol, double flow_tol_rel) {
  return check_wardrop(FeasibleSet::from_spec(spec), op(h), h, tol, flow_tol_rel);
}

MonotonicityReport check_monotonicity_affine(const Matrix& A) {
  if (A.rows() != A.cols()) throw DimensionError("check_monotonicity_affine: A must be square");
  if (A.size() == 0) return {true, 0.0};
  const Matrix sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lambda = eig.eigenvalues().minCoeff();
  return {lambda >= -1e-10, lambda};
}

MonotonicityReport check_monotonicity_affine(const AffineAdditive& model) {
  return check_monotonicity_affine(model.A);
}

}  // namespace cwe
