#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "cwe/cost_risk.hpp"
#include "cwe/game_model.hpp"
#include "cwe/uncertainty.hpp"

namespace cwe {

/// Tag selecting the closed-form CVaR operator F.
struct ExactMode {};

/// Either F (closed form) or the empirical operator built on the given samples.
using OperatorMode = std::variant<ExactMode, SampleSet>;

/// Samples behind the quasi-exact reference operator used when no closed form exists.
inline constexpr Eigen::Index kReferenceSamples = 1'000'000;
inline constexpr std::uint64_t kReferenceSeed = 0x5A5A'2017'C0DEULL;

/// h -> (CVaR_alpha[C_p(h, u)])_p, exactly or from samples. Cheap to copy;
/// copies share the immutable model and samples and are safe to call from
/// several threads.
class CostOperator {
 public:
  enum class Kind { Exact, Empirical, Reference };

  /// Throws UnsupportedError when the cost/uncertainty pair has no closed form.
  static CostOperator exact(const GameSpec& spec);
  /// Throws DimensionError when the sample dimension does not match the spec.
  static CostOperator empirical(const GameSpec& spec, SampleSet samples);
  /// Empirical operator on a large fixed-seed sample set. Labelled Kind::Reference.
  static CostOperator reference(const GameSpec& spec, Eigen::Index n = kReferenceSamples,
                                std::uint64_t seed = kReferenceSeed);

  Vector operator()(const Eigen::Ref<const Vector>& h) const;

  /// Per-path CVaR with minimizer intervals. Exact mode reports the value as
  /// a degenerate interval.
  std::vector<CvarResult> evaluate_detailed(const Eigen::Ref<const Vector>& h) const;

  Kind kind() const noexcept { return kind_; }
  Eigen::Index dimension() const noexcept;
  /// Sample count (0 in exact mode).
  Eigen::Index sample_count() const noexcept;
  std::uint64_t seed() const noexcept;

 private:
  struct State;
  CostOperator(Kind kind, std::shared_ptr<const State> state) : kind_(kind), state_(std::move(state)) {}

  Kind kind_;
  std::shared_ptr<const State> state_;
};

/// Operator for VI(F, H) or VI(F^N, H).
CostOperator cvar_operator(const GameSpec& spec, const OperatorMode& mode);

}  // namespace cwe
