#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cwe/types.hpp"
#include "cwe/uncertainty.hpp"

namespace cwe {

/// C_p(h, u) = A_p h + b_p + Cu_p u
struct AffineAdditive {
  Matrix A;   // |P| x |P|
  Vector b;   // |P|
  Matrix Cu;  // |P| x m
};

/// C_p(h, u) = (A_p + D_p u) h + b_p + Cu_p u, with D_p of size |P| x m,
/// i.e. (D_p u) is read as a row of flow coefficients.
struct AffineUncertainSlope {
  Matrix A;
  Vector b;
  Matrix Cu;
  std::vector<Matrix> D;  // one |P| x m matrix per path
};

using CostModel = std::variant<AffineAdditive, AffineUncertainSlope>;

/// Risk level alpha in the open interval (0, 1).
class RiskLevel {
 public:
  /// Throws DomainError unless 0 < alpha < 1.
  explicit RiskLevel(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// Value of inf_t { t + E[Z - t]_+ / alpha } and the flat interval of minimizers.
struct CvarResult {
  double value = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

Eigen::Index num_paths(const CostModel& model) noexcept;

/// Empty when the matrices have consistent shapes for |P| paths and an
/// m-dimensional uncertainty.
std::vector<std::string> check_cost_model(const CostModel& model, Eigen::Index paths, Eigen::Index m);

/// Per-path costs C(h, u). Throws DimensionError on size mismatch.
Vector eval_cost(const CostModel& model, const Eigen::Ref<const Vector>& h,
                 const Eigen::Ref<const Vector>& u);

/// For fixed h, C_p(h, u) = offset + weights . u. This returns (offset, weights).
struct AffineInU {
  double offset = 0.0;
  Vector weights;
};
AffineInU cost_affine_in_u(const CostModel& model, const Eigen::Ref<const Vector>& h, Eigen::Index path);

/// Empirical CVaR of the sample values z (unordered), minimized exactly at the
/// breakpoint z_(ceil(N alpha)) of the descending order statistics. When
/// N alpha is an integer k < N the minimizer set is [z_(k+1), z_(k)].
/// Throws DomainError on empty input.
CvarResult empirical_cvar(std::span<const double> z, RiskLevel alpha);

/// Same as empirical_cvar but permutes `z` in place instead of copying it.
CvarResult empirical_cvar_inplace(std::span<double> z, RiskLevel alpha);

/// CVaR of w ~ U[lo, hi]: hi - alpha (hi - lo) / 2.
double uniform_cvar(double lo, double hi, RiskLevel alpha) noexcept;

/// Closed-form F(h) for AffineAdditive costs under a UniformBox uncertainty
/// with at most one nonzero uncertainty coefficient per path.
/// Throws UnsupportedError otherwise.
Vector exact_cvar_affine_additive(const AffineAdditive& model, const Eigen::Ref<const Vector>& h,
                                  RiskLevel alpha, const UncertaintyModel& uncertainty);

/// True when exact_cvar_affine_additive accepts this combination.
bool has_closed_form_cvar(const CostModel& model, const UncertaintyModel& uncertainty) noexcept;

}  // namespace cwe
