#include "cwe/guarantees.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cwe/cost_operator.hpp"
#include "cwe/random.hpp"
#include "parallel.hpp"

namespace cwe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be a finite positive number");
}

void require_paths(int num_paths) {
  if (num_paths < 1 || num_paths > kMaxPaths)
    throw DomainError("num_paths must be in [1, " + std::to_string(kMaxPaths) + "]");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha not in (0,1)");
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

int half_ceil(int num_paths) { return (num_paths + 1) / 2; }

// prefactor * (12 L diam / (eps alpha))^{|P|}, with log of the prefactor given
// separately so overflow can be reported.
LargeValue scaled_power(double prefactor, double log_prefactor, double L, double diam, double alpha,
                        double epsilon, int num_paths) {
  const double ratio = 12.0 * L * diam / (epsilon * alpha);
  LargeValue out;
  out.log_value = log_prefactor + num_paths * std::log(ratio);
  out.value = prefactor * std::pow(ratio, num_paths);
  if (!std::isfinite(out.value)) {
    out.value = std::numeric_limits<double>::infinity();
    out.overflow = true;
  }
  return out;
}

}  // namespace

CostBounds compute_cost_bounds(const GameSpec& spec) {
  const CostRange r = cost_extrema(spec);
  return {r.min, r.max, r.sampled};
}

Interval phi_bounds(double m, double M, double alpha) {
  require_alpha(alpha);
  if (!(m <= M)) throw DomainError("phi_bounds: m must be <= M");
  return {m, m + (M - m) / alpha};
}

double compute_lipschitz(const CostModel& model, const UncertaintyModel& uncertainty) {
  return std::visit(overloaded{[](const AffineAdditive& c) {
                                 return c.A.size() == 0 ? 0.0 : c.A.rowwise().norm().maxCoeff();
                               },
                               [&](const AffineUncertainSlope& c) {
                                 const Matrix vertices = support_vertices(uncertainty);
                                 double L = 0.0;
                                 for (Eigen::Index p = 0; p < c.A.rows(); ++p)
                                   for (Eigen::Index v = 0; v < vertices.rows(); ++v) {
                                     const Vector row = c.A.row(p).transpose() +
                                                        c.D[static_cast<std::size_t>(p)] * vertices.row(v).transpose();
                                     L = std::max(L, row.norm());
                                   }
                                 return L;
                               }},
                    model);
}

LargeValue covering_number(double L, double diam, double alpha, double epsilon, int num_paths) {
  require_positive(L, "L");
  require_positive(diam, "diam(H)");
  require_alpha(alpha);
  require_positive(epsilon, "epsilon");
  require_paths(num_paths);
  const int c = half_ceil(num_paths);
  const double half = 0.5 * num_paths;
  const double prefactor = factorial(c) / (2.0 * std::pow(std::numbers::pi, half));
  const double log_prefactor = std::lgamma(c + 1.0) - std::log(2.0) - half * std::log(std::numbers::pi);
  return scaled_power(prefactor, log_prefactor, L, diam, alpha, epsilon, num_paths);
}

ExponentialConstants exponential_constants(double L, double diam, double alpha, double epsilon, int num_paths,
                                           double m, double M) {
  require_positive(L, "L");
  require_positive(diam, "diam(H)");
  require_alpha(alpha);
  require_positive(epsilon, "epsilon");
  require_paths(num_paths);
  if (!(M >= m)) throw DomainError("cost bounds: M must be >= m");
  if (M == m) throw DomainError("deterministic cost: bound vacuous");

  const int c = half_ceil(num_paths);
  const double half = 0.5 * num_paths;
  const double prefactor = 3.0 * num_paths * factorial(c) / std::pow(std::numbers::pi, half);
  const double log_prefactor = std::log(3.0 * num_paths) + std::lgamma(c + 1.0) - half * std::log(std::numbers::pi);

  ExponentialConstants out;
  out.gamma = scaled_power(prefactor, log_prefactor, L, diam, alpha, epsilon, num_paths);
  const double range = M - m;
  out.beta = alpha * epsilon * epsilon / (44.0 * num_paths * range * range);
  return out;
}

double pointwise_concentration(double alpha, double epsilon, double m, double M, std::int64_t n) {
  require_alpha(alpha);
  if (!(M > m)) throw DomainError("pointwise_concentration: requires M > m");
  if (n < 1) throw DomainError("pointwise_concentration: n must be >= 1");
  const double range = M - m;
  const double exponent = -alpha * epsilon * epsilon * static_cast<double>(n) / (11.0 * range * range);
  return std::min(1.0, 6.0 * std::exp(exponent));
}

SampleComplexity sample_complexity(double zeta, double delta, double L, double diam, double alpha, int num_paths,
                                   double m, double M) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must be in (0,1)");
  require_positive(delta, "delta");
  const ExponentialConstants k = exponential_constants(L, diam, alpha, delta, num_paths, m, M);
  const double log_ratio = k.gamma.log_value - std::log(zeta);
  if (!(log_ratio > 0.0))
    throw DomainError("sample complexity: log(gamma / zeta) = " + std::to_string(log_ratio) +
                      " is not positive; the bound is vacuous for these inputs");
  SampleComplexity out;
  out.beta = k.beta;
  out.gamma = k.gamma;
  out.raw = log_ratio / k.beta;
  out.samples = std::ceil(out.raw);
  return out;
}

BoundsReport compute_bounds_report(const GameSpec& spec) {
  const CostBounds b = compute_cost_bounds(spec);
  BoundsReport r;
  r.m = b.m;
  r.M = b.M;
  r.cost_bounds_sampled = b.sampled;
  r.L = compute_lipschitz(spec.cost, spec.uncertainty);
  r.diam_H = diameter(FeasibleSet::from_spec(spec));
  r.alpha = spec.alpha;
  r.num_paths = static_cast<int>(spec.num_paths());
  return r;
}

ConcentrationCheck empirical_concentration_check(const GameSpec& spec, const Eigen::Ref<const Vector>& h,
                                                 double alpha, double epsilon, std::int64_t n, int trials,
                                                 std::uint64_t seed, unsigned jobs) {
  require_positive(epsilon, "epsilon");
  if (n < 1) throw DomainError("n must be >= 1");
  if (trials < 1) throw DomainError("trials must be >= 1");

  GameSpec at_alpha = spec;
  at_alpha.alpha = alpha;
  const CostBounds bounds = compute_cost_bounds(at_alpha);
  const Vector exact = CostOperator::exact(at_alpha)(h);
  const Eigen::Index paths = at_alpha.num_paths();

  const auto t_count = static_cast<std::size_t>(trials);
  std::vector<std::vector<char>> hit(t_count, std::vector<char>(static_cast<std::size_t>(paths), 0));
  detail::parallel_for(t_count, jobs, [&](std::size_t t) {
    const SampleSet s = sample(at_alpha.uncertainty, n, hash_combine(seed, t));
    const Vector approx = CostOperator::empirical(at_alpha, s)(h);
    for (Eigen::Index p = 0; p < paths; ++p)
      hit[t][static_cast<std::size_t>(p)] = std::abs(approx[p] - exact[p]) >= epsilon;
  });

  ConcentrationCheck out;
  out.violations.assign(static_cast<std::size_t>(paths), 0);
  for (const auto& row : hit)
    for (Eigen::Index p = 0; p < paths; ++p) out.violations[static_cast<std::size_t>(p)] += row[static_cast<std::size_t>(p)];
  for (std::int64_t v : out.violations) {
    const double f = static_cast<double>(v) / trials;
    out.frequency.push_back(f);
    out.max_frequency = std::max(out.max_frequency, f);
  }
  out.bound = pointwise_concentration(alpha, epsilon, bounds.m, bounds.M, n);
  out.slack = 3.0 * std::sqrt(out.bound * (1.0 - out.bound) / trials);
  out.passes = out.max_frequency <= out.bound + out.slack;
  return out;
}

}  // namespace cwe
