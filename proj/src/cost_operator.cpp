#include "cwe/cost_operator.hpp"

#include "cwe/kernels.hpp"

namespace cwe {

struct CostOperator::State {
  CostModel cost;
  UncertaintyModel uncertainty;
  RiskLevel alpha;
  Eigen::Index paths;
  SampleSet samples;  // empty in exact mode
};

CostOperator CostOperator::exact(const GameSpec& spec) {
  if (!has_closed_form_cvar(spec.cost, spec.uncertainty))
    throw UnsupportedError(
        "no closed-form CVaR for this cost/uncertainty model (needs affine_additive costs, a uniform_box "
        "uncertainty and at most one uncertain term per path); use SAA or the high-N reference");
  auto state = std::make_shared<const State>(
      State{spec.cost, spec.uncertainty, RiskLevel(spec.alpha), spec.num_paths(), SampleSet{}});
  return CostOperator(Kind::Exact, std::move(state));
}

CostOperator CostOperator::empirical(const GameSpec& spec, SampleSet samples) {
  if (samples.size() < 1) throw DomainError("empirical operator needs at least one sample");
  if (samples.dimension() != cwe::dimension(spec.uncertainty))
    throw DimensionError("sample dimension " + std::to_string(samples.dimension()) + " does not match uncertainty dimension " +
                         std::to_string(cwe::dimension(spec.uncertainty)));
  auto state = std::make_shared<const State>(
      State{spec.cost, spec.uncertainty, RiskLevel(spec.alpha), spec.num_paths(), std::move(samples)});
  return CostOperator(Kind::Empirical, std::move(state));
}

CostOperator CostOperator::reference(const GameSpec& spec, Eigen::Index n, std::uint64_t seed) {
  CostOperator op = empirical(spec, sample(spec.uncertainty, n, seed));
  op.kind_ = Kind::Reference;
  return op;
}

Eigen::Index CostOperator::dimension() const noexcept { return state_->paths; }
Eigen::Index CostOperator::sample_count() const noexcept { return state_->samples.size(); }
std::uint64_t CostOperator::seed() const noexcept { return state_->samples.seed; }

std::vector<CvarResult> CostOperator::evaluate_detailed(const Eigen::Ref<const Vector>& h) const {
  const State& s = *state_;
  if (h.size() != s.paths)
    throw DimensionError("operator input has length " + std::to_string(h.size()) + ", expected " +
                         std::to_string(s.paths));
  std::vector<CvarResult> out(static_cast<std::size_t>(s.paths));

  if (kind_ == Kind::Exact) {
    const Vector f = exact_cvar_affine_additive(std::get<AffineAdditive>(s.cost), h, s.alpha, s.uncertainty);
    for (Eigen::Index p = 0; p < s.paths; ++p) out[static_cast<std::size_t>(p)] = {f[p], f[p], f[p]};
    return out;
  }

  const Matrix& draws = s.samples.draws;
  const auto n = static_cast<std::size_t>(draws.rows());
  std::vector<double> z(n);
  for (Eigen::Index p = 0; p < s.paths; ++p) {
    const AffineInU form = cost_affine_in_u(s.cost, h, p);
    kernels::affine_samples(form.offset, std::span<const double>(form.weights.data(), form.weights.size()),
                            draws.data(), n, z);
    out[static_cast<std::size_t>(p)] = empirical_cvar_inplace(z, s.alpha);
  }
  return out;
}

Vector CostOperator::operator()(const Eigen::Ref<const Vector>& h) const {
  if (kind_ == Kind::Exact) {
    const State& s = *state_;
    if (h.size() != s.paths) throw DimensionError("operator input has wrong length");
    return exact_cvar_affine_additive(std::get<AffineAdditive>(s.cost), h, s.alpha, s.uncertainty);
  }
  const auto detailed = evaluate_detailed(h);
  Vector f(static_cast<Eigen::Index>(detailed.size()));
  for (std::size_t p = 0; p < detailed.size(); ++p) f[static_cast<Eigen::Index>(p)] = detailed[p].value;
  return f;
}

CostOperator cvar_operator(const GameSpec& spec, const OperatorMode& mode) {
  if (std::holds_alternative<ExactMode>(mode)) return CostOperator::exact(spec);
  return CostOperator::empirical(spec, std::get<SampleSet>(mode));
}

}  // namespace cwe
