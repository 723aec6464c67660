#include "cwe/saa_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "cwe/random.hpp"
#include "parallel.hpp"

namespace cwe {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool strictly_decreasing(const std::vector<SizeSummary>& sizes, double SizeSummary::*field) {
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (!(sizes[i].*field < sizes[i - 1].*field)) return false;
  return !sizes.empty();
}

}  // namespace

SaaResult solve_saa(const GameSpec& spec, const SampleSet& samples, const SolverConfig& solver) {
  const CostOperator op = CostOperator::empirical(spec, samples);
  ViProblem prob{op, FeasibleSet::from_spec(spec)};
  return SaaResult{solve(prob, solver), samples.size(), samples.seed};
}

EquilibriumResult solve_exact(const GameSpec& spec, const SolverConfig& solver) {
  const CostOperator op = CostOperator::exact(spec);
  ViProblem prob{op, FeasibleSet::from_spec(spec)};
  return solve(prob, solver);
}

ReferenceResolver::ReferenceResolver(GameSpec spec, Reference reference, SolverConfig solver)
    : spec_(std::move(spec)), reference_(std::move(reference)), solver_(std::move(solver)) {}

const FlowVector& ReferenceResolver::flow() const {
  std::call_once(once_, [this] {
    if (const auto* given = std::get_if<FlowVector>(&reference_)) {
      if (given->size() != spec_.num_paths()) throw DimensionError("reference flow has the wrong length");
      cached_ = *given;
      return;
    }
    SolverConfig cfg = solver_;
    cfg.record_trace = false;
    EquilibriumResult r = solve_exact(spec_, cfg);
    if (!r.converged) throw NumericalError("exact reference solve did not converge: " + r.diagnostic);
    cached_ = std::move(r.flow);
  });
  return *cached_;
}

double ReferenceResolver::distance(const Eigen::Ref<const Vector>& h) const {
  const FlowVector& ref = flow();
  if (h.size() != ref.size()) throw DimensionError("distance: flow has the wrong length");
  return (h - ref).norm();
}

double distance_to_reference(const Eigen::Ref<const Vector>& h, const Reference& reference, const GameSpec& spec,
                             const SolverConfig& solver) {
  return ReferenceResolver(spec, reference, solver).distance(h);
}

std::uint64_t run_seed(std::uint64_t base_seed, Eigen::Index n, int run) noexcept {
  return hash_combine(hash_combine(base_seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(run));
}

bool ExperimentResult::medians_decreasing() const { return strictly_decreasing(per_size, &SizeSummary::q50); }

bool ExperimentResult::quartiles_decreasing() const {
  return strictly_decreasing(per_size, &SizeSummary::q25) && strictly_decreasing(per_size, &SizeSummary::q50) &&
         strictly_decreasing(per_size, &SizeSummary::q75);
}

void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.sample_sizes.empty()) throw DomainError("experiment: sample_sizes must be nonempty");
  for (Eigen::Index n : cfg.sample_sizes)
    if (n < 1) throw DomainError("experiment: every sample size must be >= 1");
  if (cfg.runs_per_size < 1) throw DomainError("experiment: runs must be >= 1");
  validate_config(cfg.solver);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  const ReferenceResolver reference(cfg.spec, cfg.reference, cfg.solver);

  ExperimentResult result;
  result.reference_flow = reference.flow();

  const std::size_t sizes = cfg.sample_sizes.size();
  const auto runs = static_cast<std::size_t>(cfg.runs_per_size);
  const std::size_t total = sizes * runs;
  result.runs.resize(total);

  SolverConfig solver = cfg.solver;
  solver.record_trace = false;
  const FeasibleSet fs = FeasibleSet::from_spec(cfg.spec);

  detail::parallel_for(total, cfg.jobs, [&](std::size_t task) {
    RunRecord& rec = result.runs[task];
    rec.n = cfg.sample_sizes[task / runs];
    rec.run = static_cast<int>(task % runs);
    rec.seed = run_seed(cfg.base_seed, rec.n, rec.run);
    const SampleSet samples = sample(cfg.spec.uncertainty, rec.n, rec.seed);
    const CostOperator op = CostOperator::empirical(cfg.spec, samples);
    const EquilibriumResult eq = solve(ViProblem{op, fs}, solver);
    rec.distance = reference.distance(eq.flow);
    rec.iterations = eq.iterations;
    rec.converged = eq.converged;
  });

  for (std::size_t s = 0; s < sizes; ++s) {
    SizeSummary summary;
    summary.n = cfg.sample_sizes[s];
    for (std::size_t r = 0; r < runs; ++r) {
      const RunRecord& rec = result.runs[s * runs + r];
      if (rec.converged)
        summary.sorted_distances.push_back(rec.distance);
      else
        ++summary.failures;
    }
    std::sort(summary.sorted_distances.begin(), summary.sorted_distances.end());
    if (!summary.sorted_distances.empty()) {
      summary.q25 = quantile_sorted(summary.sorted_distances, 0.25);
      summary.q50 = quantile_sorted(summary.sorted_distances, 0.50);
      summary.q75 = quantile_sorted(summary.sorted_distances, 0.75);
      summary.q95 = quantile_sorted(summary.sorted_distances, 0.95);
    } else {
      summary.q25 = summary.q50 = summary.q75 = summary.q95 = std::numeric_limits<double>::quiet_NaN();
    }
    result.failures += summary.failures;
    result.per_size.push_back(std::move(summary));
  }

  if (static_cast<double>(result.failures) > cfg.max_failure_fraction * static_cast<double>(total)) {
    throw ExperimentFailure(std::to_string(result.failures) + " of " + std::to_string(total) +
                                " runs did not converge",
                            std::move(result));
  }
  return result;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<CdfStep> empirical_cdf(std::vector<double> distances) {
  if (distances.empty()) throw DomainError("empirical_cdf: empty input");
  std::sort(distances.begin(), distances.end());
  const auto n = static_cast<double>(distances.size());
  std::vector<CdfStep> steps;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (i + 1 < distances.size() && distances[i + 1] == distances[i]) continue;
    steps.push_back({distances[i], static_cast<double>(i + 1) / n});
  }
  return steps;
}

void write_runs_csv(std::ostream& out, const ExperimentResult& result) {
  out << "N,run,seed,distance,iterations,converged\n";
  for (const RunRecord& r : result.runs)
    out << r.n << ',' << r.run << ',' << r.seed << ',' << format_double(r.distance) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << '\n';
}

void write_cdf_csv(std::ostream& out, const std::vector<CdfStep>& steps) {
  out << "x,F\n";
  for (const CdfStep& s : steps) out << format_double(s.x) << ',' << format_double(s.F) << '\n';
}

}  // namespace cwe
