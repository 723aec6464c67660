#pragma once

#include <cstdint>
#include <vector>

#include "cwe/game_model.hpp"
#include "cwe/types.hpp"

namespace cwe {

struct CostBounds {
  double m = 0.0;
  double M = 0.0;
  bool sampled = false;  // vertex cap exceeded: estimate from sampled vertices
};

/// Exact min/max of C_p(h, u) over p, vertices of H and support vertices of U.
CostBounds compute_cost_bounds(const GameSpec& spec);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Range [m, m + (M - m) / alpha] of t + [C - t]_+ / alpha for t, C in [m, M].
Interval phi_bounds(double m, double M, double alpha);

/// Lipschitz constant of h -> C_p(h, u) uniformly in p and u: the largest
/// Euclidean row norm of the flow-coefficient matrix, maximised over support
/// vertices for uncertain slopes.
double compute_lipschitz(const CostModel& model, const UncertaintyModel& uncertainty);

/// A positive quantity that may exceed double range. `log_value` is always
/// finite; `value` is +inf when `overflow` is set.
struct LargeValue {
  double value = 0.0;
  double log_value = 0.0;
  bool overflow = false;
};

inline constexpr int kMaxPaths = 170;

/// K = ceil(|P|/2)! / (2 pi^{|P|/2}) * (12 L diam / (eps alpha))^{|P|}
LargeValue covering_number(double L, double diam, double alpha, double epsilon, int num_paths);

struct ExponentialConstants {
  LargeValue gamma;  // 3|P| ceil(|P|/2)! / pi^{|P|/2} * (12 L diam / (eps alpha))^{|P|}
  double beta = 0.0;  // alpha eps^2 / (44 |P| (M - m)^2)
};

/// Throws DomainError("deterministic cost: bound vacuous") when M == m.
ExponentialConstants exponential_constants(double L, double diam, double alpha, double epsilon, int num_paths,
                                           double m, double M);

/// min(1, 6 exp(-alpha eps^2 n / (11 (M - m)^2)))
double pointwise_concentration(double alpha, double epsilon, double m, double M, std::int64_t n);

struct SampleComplexity {
  double raw = 0.0;      // (1/beta) log(gamma / zeta)
  double samples = 0.0;  // ceil(raw)
  double beta = 0.0;
  LargeValue gamma;
};

/// N(zeta, delta) = (1/beta(delta)) log(gamma(delta) / zeta). `delta` is the
/// user-supplied value of delta(eps); the result is conditional on it.
SampleComplexity sample_complexity(double zeta, double delta, double L, double diam, double alpha, int num_paths,
                                   double m, double M);

struct BoundsReport {
  double m = 0.0;
  double M = 0.0;
  double L = 0.0;
  double diam_H = 0.0;
  double alpha = 0.0;
  int num_paths = 0;
  bool cost_bounds_sampled = false;
};

BoundsReport compute_bounds_report(const GameSpec& spec);

struct ConcentrationCheck {
  std::vector<double> frequency;  // per path: fraction of trials with |F^N_p - F_p| >= eps
  std::vector<std::int64_t> violations;
  double max_frequency = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // 3 sqrt(bound (1 - bound) / trials)
  bool passes = false;
};

/// Monte Carlo check of the pointwise concentration inequality at h. Trial t
/// draws n samples with seed hash(seed, t). Requires a closed-form CVaR.
ConcentrationCheck empirical_concentration_check(const GameSpec& spec, const Eigen::Ref<const Vector>& h,
                                                 double alpha, double epsilon, std::int64_t n, int trials,
                                                 std::uint64_t seed = 0, unsigned jobs = 1);

}  // namespace cwe
