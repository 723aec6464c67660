#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "cwe/equilibrium.hpp"
#include "cwe/game_model.hpp"

namespace cwe {

/// Equilibrium of VI(F^N, H) together with the sample set it came from.
struct SaaResult {
  EquilibriumResult equilibrium;
  Eigen::Index sample_count = 0;
  std::uint64_t seed = 0;
};

SaaResult solve_saa(const GameSpec& spec, const SampleSet& samples, const SolverConfig& solver = {});

/// Solve with the closed-form operator.
EquilibriumResult solve_exact(const GameSpec& spec, const SolverConfig& solver = {});

/// Reference point h*: the exact CWE of the spec or an explicitly supplied flow.
struct ExactReference {};
using Reference = std::variant<ExactReference, FlowVector>;

/// Resolves a Reference once and caches the flow. Thread-safe.
class ReferenceResolver {
 public:
  ReferenceResolver(GameSpec spec, Reference reference, SolverConfig solver);

  /// Throws UnsupportedError (no closed form) or NumericalError (exact solve
  /// did not converge) in exact mode.
  const FlowVector& flow() const;
  double distance(const Eigen::Ref<const Vector>& h) const;

 private:
  GameSpec spec_;
  Reference reference_;
  SolverConfig solver_;
  mutable std::once_flag once_;
  mutable std::optional<FlowVector> cached_;
};

/// ||h - h*||. Exact mode solves the exact VI.
double distance_to_reference(const Eigen::Ref<const Vector>& h, const Reference& reference, const GameSpec& spec,
                             const SolverConfig& solver = {});

struct ExperimentConfig {
  GameSpec spec;
  std::vector<Eigen::Index> sample_sizes;
  int runs_per_size = 100;
  std::uint64_t base_seed = 0;
  SolverConfig solver;
  Reference reference = ExactReference{};
  unsigned jobs = 0;  // 0: one worker per hardware thread
  double max_failure_fraction = 0.10;
};

struct RunRecord {
  Eigen::Index n = 0;
  int run = 0;
  std::uint64_t seed = 0;
  double distance = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SizeSummary {
  Eigen::Index n = 0;
  std::vector<double> sorted_distances;  // converged runs only
  int failures = 0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;  // ordered by (sample size index, run)
  std::vector<SizeSummary> per_size;
  FlowVector reference_flow;
  int failures = 0;

  /// Medians strictly decrease along sample_sizes.
  bool medians_decreasing() const;
  /// 25/50/75% quantiles each strictly decrease along sample_sizes.
  bool quartiles_decreasing() const;
};

/// Seed of run `run` at sample size n.
std::uint64_t run_seed(std::uint64_t base_seed, Eigen::Index n, int run) noexcept;

/// More than max_failure_fraction of the runs did not converge. Carries the
/// full result so callers can still report it.
class ExperimentFailure : public Error {
 public:
  ExperimentFailure(const std::string& what, ExperimentResult result)
      : Error(what), result_(std::move(result)) {}
  const ExperimentResult& result() const noexcept { return result_; }

 private:
  ExperimentResult result_;
};

void validate_experiment(const ExperimentConfig& cfg);

/// Runs every (N, run) pair, possibly in parallel. Output depends only on cfg.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct CdfStep {
  double x = 0.0;
  double F = 0.0;
};

/// Right-continuous step points of the empirical CDF, ties merged.
/// Throws DomainError on empty input.
std::vector<CdfStep> empirical_cdf(std::vector<double> distances);

/// Linearly interpolated quantile of sorted data (Hyndman-Fan type 7).
double quantile_sorted(const std::vector<double>& sorted, double q);

/// CSV with header N,run,seed,distance,iterations,converged.
void write_runs_csv(std::ostream& out, const ExperimentResult& result);
/// CSV with header x,F.
void write_cdf_csv(std::ostream& out, const std::vector<CdfStep>& steps);

}  // namespace cwe
