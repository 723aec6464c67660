#include "cwe/cost_risk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "cwe/kernels.hpp"

namespace cwe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Relative slack under which N * alpha is treated as an integer.
constexpr double kIntegerSnap = 1e-12;

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_affine_parts(const Matrix& A, const Vector& b, const Matrix& Cu, Eigen::Index paths,
                        Eigen::Index m, std::vector<std::string>& out) {
  if (A.rows() != paths || A.cols() != paths)
    out.push_back("cost.A: expected " + shape(paths, paths) + ", got " + shape(A.rows(), A.cols()));
  if (b.size() != paths)
    out.push_back("cost.b: expected length " + std::to_string(paths) + ", got " + std::to_string(b.size()));
  if (Cu.rows() != paths || Cu.cols() != m)
    out.push_back("cost.Cu: expected " + shape(paths, m) + ", got " + shape(Cu.rows(), Cu.cols()));
  if (!A.allFinite() || !b.allFinite() || !Cu.allFinite()) out.push_back("cost: non-finite coefficient");
}

}  // namespace

RiskLevel::RiskLevel(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha not in (0,1)");
}

Eigen::Index num_paths(const CostModel& model) noexcept {
  return std::visit([](const auto& c) { return c.b.size(); }, model);
}

std::vector<std::string> check_cost_model(const CostModel& model, Eigen::Index paths, Eigen::Index m) {
  std::vector<std::string> out;
  std::visit(overloaded{[&](const AffineAdditive& c) { check_affine_parts(c.A, c.b, c.Cu, paths, m, out); },
                        [&](const AffineUncertainSlope& c) {
                          check_affine_parts(c.A, c.b, c.Cu, paths, m, out);
                          if (static_cast<Eigen::Index>(c.D.size()) != paths) {
                            out.push_back("cost.D: expected " + std::to_string(paths) + " matrices, got " +
                                          std::to_string(c.D.size()));
                            return;
                          }
                          for (std::size_t p = 0; p < c.D.size(); ++p) {
                            if (c.D[p].rows() != paths || c.D[p].cols() != m)
                              out.push_back("cost.D[" + std::to_string(p) + "]: expected " + shape(paths, m) +
                                            ", got " + shape(c.D[p].rows(), c.D[p].cols()));
                            else if (!c.D[p].allFinite())
                              out.push_back("cost.D[" + std::to_string(p) + "]: non-finite coefficient");
                          }
                        }},
             model);
  return out;
}

Vector eval_cost(const CostModel& model, const Eigen::Ref<const Vector>& h, const Eigen::Ref<const Vector>& u) {
  return std::visit(
      overloaded{[&](const AffineAdditive& c) -> Vector {
                   if (h.size() != c.A.cols() || u.size() != c.Cu.cols())
                     throw DimensionError("eval_cost: dimension mismatch");
                   return c.A * h + c.b + c.Cu * u;
                 },
                 [&](const AffineUncertainSlope& c) -> Vector {
                   if (h.size() != c.A.cols() || u.size() != c.Cu.cols())
                     throw DimensionError("eval_cost: dimension mismatch");
                   Vector out = c.A * h + c.b + c.Cu * u;
                   for (Eigen::Index p = 0; p < out.size(); ++p) out[p] += h.dot(c.D[p] * u);
                   return out;
                 }},
      model);
}

AffineInU cost_affine_in_u(const CostModel& model, const Eigen::Ref<const Vector>& h, Eigen::Index path) {
  return std::visit(overloaded{[&](const AffineAdditive& c) {
                                 return AffineInU{c.A.row(path).dot(h) + c.b[path],
                                                  c.Cu.row(path).transpose()};
                               },
                               [&](const AffineUncertainSlope& c) {
                                 return AffineInU{c.A.row(path).dot(h) + c.b[path],
                                                  c.Cu.row(path).transpose() + c.D[path].transpose() * h};
                               }},
                    model);
}

CvarResult empirical_cvar_inplace(std::span<double> z, RiskLevel alpha) {
  const std::size_t n = z.size();
  if (n == 0) throw DomainError("empirical_cvar: empty sample set");

  const double scaled = static_cast<double>(n) * alpha.value();
  double rank = scaled;
  const double nearest = std::round(scaled);
  const bool integral = std::abs(scaled - nearest) <= kIntegerSnap * std::max(1.0, scaled);
  if (integral) rank = nearest;
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(rank)), 1, n);

  // z[k-1] becomes the k-th largest; everything after it is <= it.
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(k - 1), z.end(), std::greater<>{});
  const double t = z[k - 1];

  CvarResult r;
  r.value = t + kernels::positive_part_sum(z, t) / scaled;
  r.t_hi = t;
  r.t_lo = t;
  if (integral && k < n) r.t_lo = *std::max_element(z.begin() + static_cast<std::ptrdiff_t>(k), z.end());
  return r;
}

CvarResult empirical_cvar(std::span<const double> z, RiskLevel alpha) {
  std::vector<double> scratch(z.begin(), z.end());
  return empirical_cvar_inplace(scratch, alpha);
}

double uniform_cvar(double lo, double hi, RiskLevel alpha) noexcept {
  return hi - alpha.value() * (hi - lo) / 2.0;
}

bool has_closed_form_cvar(const CostModel& model, const UncertaintyModel& uncertainty) noexcept {
  const auto* additive = std::get_if<AffineAdditive>(&model);
  if (additive == nullptr || !std::holds_alternative<UniformBox>(uncertainty)) return false;
  for (Eigen::Index p = 0; p < additive->Cu.rows(); ++p)
    if ((additive->Cu.row(p).array() != 0.0).count() > 1) return false;
  return true;
}

Vector exact_cvar_affine_additive(const AffineAdditive& model, const Eigen::Ref<const Vector>& h,
                                  RiskLevel alpha, const UncertaintyModel& uncertainty) {
  const auto* box = std::get_if<UniformBox>(&uncertainty);
  if (box == nullptr) throw UnsupportedError("exact CVaR requires a uniform_box uncertainty; use SAA or high-N reference");
  if (h.size() != model.A.cols() || box->lo.size() != model.Cu.cols())
    throw DimensionError("exact_cvar_affine_additive: dimension mismatch");

  Vector out = model.A * h + model.b;
  for (Eigen::Index p = 0; p < out.size(); ++p) {
    Eigen::Index nonzero = -1;
    for (Eigen::Index j = 0; j < model.Cu.cols(); ++j) {
      if (model.Cu(p, j) == 0.0) continue;
      if (nonzero >= 0)
        throw UnsupportedError("path " + std::to_string(p) +
                               " has more than one uncertain term: no closed form; use SAA or high-N reference");
      nonzero = j;
    }
    if (nonzero < 0) continue;
    const double c = model.Cu(p, nonzero);
    const double a = c * box->lo[nonzero];
    const double b = c * box->hi[nonzero];
    out[p] += uniform_cvar(std::min(a, b), std::max(a, b), alpha);
  }
  return out;
}

}  // namespace cwe
