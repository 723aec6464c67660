#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "cwe/cost_operator.hpp"
#include "cwe/guarantees.hpp"
#include "cwe/spec_io.hpp"
#include "support/hp_oracle.hpp"
#include "support/oracles.hpp"

using namespace cwe;

TEST_CASE("cost bounds") {
  const GameSpec spec = two_node_five_path_spec();
  const CostBounds b = compute_cost_bounds(spec);
  CHECK(b.m == 950.0);
  CHECK(b.M == 23800.0);
  CHECK_FALSE(b.sampled);

  GameSpec shifted = spec;
  std::get<AffineAdditive>(shifted.cost).b.array() += 100.0;
  const CostBounds s = compute_cost_bounds(shifted);
  CHECK(s.m == b.m + 100);
  CHECK(s.M == b.M + 100);

  GameSpec constant;
  constant.od_pairs = {{"w", 1.0}};
  constant.paths = {{"p", "w"}};
  constant.cost = AffineAdditive{Matrix::Zero(1, 1), Vector::Constant(1, 7.0), Matrix::Zero(1, 1)};
  constant.uncertainty = UniformBox{Vector::Zero(1), Vector::Ones(1)};
  constant.alpha = 0.3;
  const CostBounds c = compute_cost_bounds(constant);
  CHECK(c.m == 7.0);
  CHECK(c.M == 7.0);
}

TEST_CASE("phi bounds") {
  const Interval i = phi_bounds(0, 1, 0.5);
  CHECK(i.lo == 0);
  CHECK(i.hi == 2);
  CHECK(phi_bounds(3, 3, 0.2).hi == 3);
  CHECK(phi_bounds(0, 1, 1 - 1e-12).hi == doctest::Approx(1.0));
  CHECK_THROWS_AS(phi_bounds(0, 1, 1.0), DomainError);
}

TEST_CASE("Lipschitz constant") {
  const GameSpec spec = two_node_five_path_spec();
  const double L = compute_lipschitz(spec.cost, spec.uncertainty);
  CHECK(L == doctest::Approx(std::sqrt(16.0 + 10000.0)).epsilon(1e-15));
  CHECK(L == doctest::Approx(100.08).epsilon(1e-4));

  const auto& c = std::get<AffineAdditive>(spec.cost);
  CHECK(compute_lipschitz(AffineAdditive{Matrix::Zero(5, 5), c.b, c.Cu}, spec.uncertainty) == 0.0);
  CHECK(compute_lipschitz(AffineAdditive{2 * c.A, c.b, c.Cu}, spec.uncertainty) == 2 * L);

  // Slope vertex on u = (1, 0) adds 50 to the first coefficient of path 1.
  std::vector<Matrix> D(5, Matrix::Zero(5, 2));
  D[0](0, 0) = 200.0;
  const double Ls = compute_lipschitz(AffineUncertainSlope{c.A, c.b, c.Cu, D}, spec.uncertainty);
  CHECK(Ls == doctest::Approx(std::hypot(240.0, 20.0)));
}

TEST_CASE("covering number") {
  const LargeValue k = covering_number(1, 1, 0.5, 1, 2);
  CHECK(k.value == doctest::Approx(576.0 / (2 * std::numbers::pi)).epsilon(1e-14));
  CHECK(k.value == doctest::Approx(91.67).epsilon(1e-4));
  CHECK(k.log_value == doctest::Approx(std::log(k.value)));
  CHECK_FALSE(k.overflow);

  const LargeValue k2 = covering_number(1, 1, 0.5, 2, 2);
  CHECK(k2.value == doctest::Approx(k.value / 4).epsilon(1e-14));

  const GameSpec spec = two_node_five_path_spec();
  const BoundsReport r = compute_bounds_report(spec);
  const LargeValue g = covering_number(r.L, r.diam_H, 0.2, 100, 5);
  CHECK(std::isfinite(g.value));
  CHECK(g.value > 0);
  CHECK(oracle::hp::rel_error(g.value, oracle::hp::covering(r.L, r.diam_H, 0.2, 100, 5)) <= 1e-12);

  const LargeValue huge = covering_number(1e6, 1e6, 0.01, 1e-6, 170);
  CHECK(huge.overflow);
  CHECK(std::isinf(huge.value));
  CHECK(std::isfinite(huge.log_value));

  CHECK_THROWS_AS(covering_number(1, 1, 0.5, 1, 171), DomainError);
  CHECK_THROWS_AS(covering_number(1, 1, 0.5, 0, 2), DomainError);
  CHECK_THROWS_AS(covering_number(0, 1, 0.5, 1, 2), DomainError);
}

TEST_CASE("exponential constants") {
  const ExponentialConstants e = exponential_constants(1, 1, 0.2, 1, 5, 0, 1);
  CHECK(std::abs(e.beta - 9.0909e-4) <= 1e-8);
  CHECK(e.beta == doctest::Approx(0.2 / 220).epsilon(1e-15));
  CHECK(exponential_constants(1, 1, 0.2, 2, 5, 0, 1).beta == doctest::Approx(4 * e.beta).epsilon(1e-15));

  try {
    exponential_constants(1, 1, 0.2, 1, 5, 3, 3);
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(std::string(err.what()) == "deterministic cost: bound vacuous");
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double L = 0.1 + 100 * u(rng);
    const double diam = 0.1 + 500 * u(rng);
    const double alpha = 0.01 + 0.98 * u(rng);
    const double eps = 0.01 + 10 * u(rng);
    const int P = 1 + static_cast<int>(rng() % 12);
    const LargeValue k = covering_number(L, diam, alpha, eps, P);
    const ExponentialConstants x = exponential_constants(L, diam, alpha, eps, P, 0, 10);
    CHECK(std::abs(x.gamma.value - 6 * P * k.value) <= 1e-12 * x.gamma.value);
    CHECK(x.beta > 0);
    CHECK(x.gamma.value > 0);
    const ExponentialConstants bigger_eps = exponential_constants(L, diam, alpha, 1.5 * eps, P, 0, 10);
    CHECK(bigger_eps.beta > x.beta);
    CHECK(bigger_eps.gamma.value < x.gamma.value);
    const ExponentialConstants bigger_alpha = exponential_constants(L, diam, std::min(0.999, 1.2 * alpha), eps, P, 0, 10);
    CHECK(bigger_alpha.beta > x.beta);
  }
}

TEST_CASE("pointwise concentration") {
  CHECK(pointwise_concentration(0.5, 0.1, 0, 1, 10'000) == doctest::Approx(6 * std::exp(-50.0 / 11)).epsilon(1e-14));
  CHECK(pointwise_concentration(0.5, 0.1, 0, 1, 10'000) == doctest::Approx(0.0635).epsilon(1e-3));
  // exponent = -ln 6 at n = 11 ln 6 / (0.2 * 0.25)
  const auto n_cap = static_cast<std::int64_t>(std::floor(11 * std::log(6.0) / 0.05));
  CHECK(pointwise_concentration(0.2, 0.5, 0, 1, n_cap) == 1.0);
  double previous = 1.0;
  for (std::int64_t n = 1; n < 100'000; n *= 3) {
    const double b = pointwise_concentration(0.2, 0.5, 0, 1, n);
    CHECK(b <= previous);
    previous = b;
  }
  CHECK(previous < 1e-10);
}

TEST_CASE("sample complexity") {
  const double L = 100.08, diam = 439.3, alpha = 0.2, m = 950, M = 23800;
  const SampleComplexity s = sample_complexity(0.05, 50, L, diam, alpha, 5, m, M);
  CHECK(std::isfinite(s.samples));
  CHECK(s.samples == std::ceil(s.raw));
  const double ref = static_cast<double>(oracle::hp::samples(0.05, 50, L, diam, alpha, 5, m, M));
  CHECK(std::abs(s.samples - std::ceil(ref)) <= 1.0);
  CHECK(oracle::hp::rel_error(s.raw, oracle::hp::samples(0.05, 50, L, diam, alpha, 5, m, M)) <= 1e-10);

  const SampleComplexity half = sample_complexity(0.025, 50, L, diam, alpha, 5, m, M);
  CHECK(half.raw - s.raw == doctest::Approx(std::log(2.0) / s.beta).epsilon(1e-9));

  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {1.0, 5.0, 20.0, 80.0, 300.0}) {
    const double n = sample_complexity(0.05, delta, L, diam, alpha, 5, m, M).raw;
    CHECK(n < prev);
    prev = n;
  }
  prev = 0;
  for (int P = 1; P <= 20; ++P) {
    const double n = sample_complexity(0.05, 50, L, diam, alpha, P, m, M).raw;
    CHECK(n > prev);
    prev = n;
  }

  // gamma / zeta < 1: P = 1, tiny ratio, zeta close to 1.
  CHECK_THROWS_AS(sample_complexity(0.99, 1e6, 1e-3, 1e-3, 0.5, 1, 0, 1), DomainError);
  CHECK_THROWS_AS(sample_complexity(0.05, 0, L, diam, alpha, 5, m, M), DomainError);
  CHECK_THROWS_AS(sample_complexity(1.0, 50, L, diam, alpha, 5, m, M), DomainError);
}

TEST_CASE("formula calculators agree with high-precision evaluation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double L = 0.5 + 200 * u(rng);
    const double diam = 1 + 800 * u(rng);
    const double alpha = 0.05 + 0.9 * u(rng);
    const double eps = 0.5 + 100 * u(rng);
    const int P = 1 + static_cast<int>(rng() % 30);
    const double m = 100 * u(rng);
    const double M = m + 1 + 1000 * u(rng);
    const double zeta = 0.001 + 0.2 * u(rng);
    const LargeValue k = covering_number(L, diam, alpha, eps, P);
    const ExponentialConstants e = exponential_constants(L, diam, alpha, eps, P, m, M);
    REQUIRE_FALSE(e.gamma.overflow);
    CHECK(oracle::hp::rel_error(k.value, oracle::hp::covering(L, diam, alpha, eps, P)) <= 1e-10);
    CHECK(oracle::hp::rel_error(e.gamma.value, oracle::hp::gamma(L, diam, alpha, eps, P)) <= 1e-10);
    CHECK(oracle::hp::rel_error(e.beta, oracle::hp::beta(alpha, eps, P, m, M)) <= 1e-10);
    const SampleComplexity s = sample_complexity(zeta, eps, L, diam, alpha, P, m, M);
    CHECK(oracle::hp::rel_error(s.raw, oracle::hp::samples(zeta, eps, L, diam, alpha, P, m, M)) <= 1e-10);
  }
}

TEST_CASE("constant shift of every sampled cost moves the operator by sqrt(P) c") {
  const GameSpec spec = two_node_five_path_spec();
  const SampleSet s = sample(spec.uncertainty, 300, 77);
  const CostOperator base = CostOperator::empirical(spec, s);
  std::mt19937_64 rng(8);
  const FeasibleSet fs = FeasibleSet::from_spec(spec);
  for (double c : {0.5, 3.0, 40.0}) {
    GameSpec shifted = spec;
    std::get<AffineAdditive>(shifted.cost).b.array() += c;
    const CostOperator moved = CostOperator::empirical(shifted, s);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector h = oracle::random_feasible(fs.groups(), fs.demands(), 5, rng);
      CHECK((moved(h) - base(h)).norm() == doctest::Approx(std::sqrt(5.0) * c).epsilon(1e-9));
    }
  }

  // Bounded perturbations of each sample never move a path CVaR by more than eps.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = 0.1 + 10 * std::abs(u(rng));
    const Vector h = oracle::random_feasible(fs.groups(), fs.demands(), 5, rng);
    Vector dev(5);
    for (Eigen::Index p = 0; p < 5; ++p) {
      const AffineInU a = cost_affine_in_u(spec.cost, h, p);
      std::vector<double> z(300), zp(300);
      for (int i = 0; i < 300; ++i) {
        z[static_cast<std::size_t>(i)] = a.offset + a.weights.dot(s.draws.row(i).transpose());
        zp[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + eps * u(rng);
      }
      dev[p] = empirical_cvar(zp, RiskLevel(spec.alpha)).value - empirical_cvar(z, RiskLevel(spec.alpha)).value;
    }
    CHECK(dev.norm() <= std::sqrt(5.0) * eps + 1e-9);
  }
}

TEST_CASE("empirical concentration check") {
  const GameSpec spec = two_node_five_path_spec();
  const Vector star = oracle::published_h_star();
  const double range = 23800 - 950;

  const ConcentrationCheck wide = empirical_concentration_check(spec, star, spec.alpha, 1.01 * range, 20, 50, 3);
  CHECK(wide.max_frequency == 0.0);
  CHECK(wide.passes);

  const ConcentrationCheck vacuous = empirical_concentration_check(spec, star, spec.alpha, 1e-6, 1, 50, 3);
  CHECK(vacuous.bound == 1.0);
  CHECK(vacuous.passes);

  const ConcentrationCheck tight = empirical_concentration_check(spec, star, spec.alpha, 0.25 * range, 5000, 200, 4, 2);
  CHECK(tight.bound < 0.05);
  CHECK(tight.frequency.size() == 5);
  CHECK(tight.passes);
  CHECK(tight.max_frequency <= tight.bound + tight.slack);

  const ConcentrationCheck again = empirical_concentration_check(spec, star, spec.alpha, 0.25 * range, 5000, 200, 4, 1);
  CHECK(again.violations == tight.violations);

  GameSpec slope = spec;
  const auto& c = std::get<AffineAdditive>(spec.cost);
  slope.cost = AffineUncertainSlope{c.A, c.b, c.Cu, std::vector<Matrix>(5, Matrix::Zero(5, 2))};
  CHECK_THROWS_AS(empirical_concentration_check(slope, star, spec.alpha, 1, 10, 10), UnsupportedError);
}
