#include "cwe/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "cwe/random.hpp"

namespace cwe {

namespace {

std::string od_locus(std::size_t i, const OdPair& od) {
  return "od_pairs[" + std::to_string(i) + "] (id '" + od.id + "')";
}

std::string path_locus(std::size_t i, const Path& p) {
  return "paths[" + std::to_string(i) + "] (id '" + p.id + "')";
}

}  // namespace

ValidationReport validate_spec(const GameSpec& spec) {
  ValidationReport report;
  auto violate = [&](std::string locus, std::string message) {
    report.violations.push_back({std::move(locus), std::move(message)});
  };

  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) violate("alpha", "alpha not in (0,1)");
  if (spec.od_pairs.empty()) violate("od_pairs", "at least one OD pair is required");
  if (spec.paths.empty()) violate("paths", "at least one path is required");

  std::unordered_map<std::string, std::size_t> od_index;
  for (std::size_t i = 0; i < spec.od_pairs.size(); ++i) {
    const auto& od = spec.od_pairs[i];
    if (!od_index.emplace(od.id, i).second) violate(od_locus(i, od), "duplicate OD pair id");
    if (!std::isfinite(od.demand) || od.demand < 0.0)
      violate(od_locus(i, od), "demand must be a finite nonnegative number");
  }

  std::set<std::string> path_ids;
  std::vector<std::size_t> paths_per_od(spec.od_pairs.size(), 0);
  for (std::size_t i = 0; i < spec.paths.size(); ++i) {
    const auto& p = spec.paths[i];
    if (!path_ids.insert(p.id).second) violate(path_locus(i, p), "duplicate path id");
    auto it = od_index.find(p.od);
    if (it == od_index.end())
      violate(path_locus(i, p), "path '" + p.id + "' references unknown OD pair '" + p.od + "'");
    else
      ++paths_per_od[it->second];
  }
  for (std::size_t i = 0; i < spec.od_pairs.size(); ++i)
    if (paths_per_od[i] == 0) violate(od_locus(i, spec.od_pairs[i]), "OD pair has no paths");

  bool uncertainty_ok = true;
  for (auto& msg : check_model(spec.uncertainty)) {
    violate("uncertainty", std::move(msg));
    uncertainty_ok = false;
  }
  bool cost_ok = true;
  for (auto& msg : check_cost_model(spec.cost, spec.num_paths(), dimension(spec.uncertainty))) {
    violate("cost", std::move(msg));
    cost_ok = false;
  }

  if (report.ok() && uncertainty_ok && cost_ok) {
    try {
      const CostRange range = cost_extrema(spec);
      if (range.sampled)
        report.warnings.push_back("cost nonnegativity checked on " + std::to_string(range.evaluated) +
                                  " sampled vertex pairs, not by full enumeration");
      const double scale = std::max({1.0, std::abs(range.min), std::abs(range.max)});
      if (range.min < -1e-9 * scale)
        violate("cost", "cost is negative somewhere on H x U (minimum " + std::to_string(range.min) + ")");
    } catch (const Error& e) {
      violate("cost", e.what());
    }
  }
  return report;
}

FeasibleSet::FeasibleSet(std::vector<std::vector<Eigen::Index>> groups, Vector demands)
    : groups_(std::move(groups)), demands_(std::move(demands)) {
  if (static_cast<Eigen::Index>(groups_.size()) != demands_.size())
    throw DomainError("FeasibleSet: one demand per group required");
  for (const auto& g : groups_) num_paths_ += static_cast<Eigen::Index>(g.size());
  group_of_.assign(static_cast<std::size_t>(num_paths_), std::numeric_limits<std::size_t>::max());
  for (std::size_t w = 0; w < groups_.size(); ++w) {
    if (groups_[w].empty()) throw DomainError("FeasibleSet: group " + std::to_string(w) + " is empty");
    if (!(demands_[static_cast<Eigen::Index>(w)] >= 0.0))
      throw DomainError("FeasibleSet: demand " + std::to_string(w) + " must be >= 0");
    for (Eigen::Index p : groups_[w]) {
      if (p < 0 || p >= num_paths_ || group_of_[static_cast<std::size_t>(p)] != std::numeric_limits<std::size_t>::max())
        throw DomainError("FeasibleSet: groups must partition the path indices");
      group_of_[static_cast<std::size_t>(p)] = w;
    }
  }
}

FeasibleSet FeasibleSet::from_spec(const GameSpec& spec) {
  std::unordered_map<std::string, std::size_t> od_index;
  for (std::size_t i = 0; i < spec.od_pairs.size(); ++i) od_index.emplace(spec.od_pairs[i].id, i);
  std::vector<std::vector<Eigen::Index>> groups(spec.od_pairs.size());
  for (std::size_t i = 0; i < spec.paths.size(); ++i) {
    auto it = od_index.find(spec.paths[i].od);
    if (it == od_index.end())
      throw DomainError("path '" + spec.paths[i].id + "' references unknown OD pair '" + spec.paths[i].od + "'");
    groups[it->second].push_back(static_cast<Eigen::Index>(i));
  }
  Vector demands(static_cast<Eigen::Index>(spec.od_pairs.size()));
  for (std::size_t i = 0; i < spec.od_pairs.size(); ++i) demands[static_cast<Eigen::Index>(i)] = spec.od_pairs[i].demand;
  return FeasibleSet(std::move(groups), std::move(demands));
}

FlowVector FeasibleSet::uniform_split() const {
  FlowVector h(num_paths_);
  for (std::size_t w = 0; w < groups_.size(); ++w)
    for (Eigen::Index p : groups_[w])
      h[p] = demands_[static_cast<Eigen::Index>(w)] / static_cast<double>(groups_[w].size());
  return h;
}

std::uint64_t FeasibleSet::vertex_count() const noexcept {
  std::uint64_t count = 1;
  for (const auto& g : groups_) {
    const auto size = static_cast<std::uint64_t>(g.size());
    if (count > std::numeric_limits<std::uint64_t>::max() / size) return std::numeric_limits<std::uint64_t>::max();
    count *= size;
  }
  return count;
}

FlowVector FeasibleSet::vertex(std::uint64_t index) const {
  FlowVector h = FlowVector::Zero(num_paths_);
  for (std::size_t w = 0; w < groups_.size(); ++w) {
    const auto size = static_cast<std::uint64_t>(groups_[w].size());
    h[groups_[w][index % size]] = demands_[static_cast<Eigen::Index>(w)];
    index /= size;
  }
  return h;
}

FeasibilityReport is_feasible(const Eigen::Ref<const Vector>& h, const FeasibleSet& fs) {
  if (h.size() != fs.num_paths())
    throw DimensionError("flow has length " + std::to_string(h.size()) + ", expected " +
                         std::to_string(fs.num_paths()));
  FeasibilityReport r;
  double worst_negative = 0.0;
  double worst_demand = 0.0;
  for (Eigen::Index p = 0; p < h.size(); ++p) {
    if (!std::isfinite(h[p])) return {false, std::numeric_limits<double>::infinity()};
    worst_negative = std::max(worst_negative, -h[p]);
  }
  for (std::size_t w = 0; w < fs.num_groups(); ++w) {
    double s = 0.0;
    for (Eigen::Index p : fs.groups()[w]) s += h[p];
    worst_demand = std::max(worst_demand, std::abs(s - fs.demands()[static_cast<Eigen::Index>(w)]));
  }
  r.max_violation = std::max(worst_negative, worst_demand);
  r.feasible = worst_negative <= kNonnegTol && worst_demand <= kDemandTol;
  return r;
}

Vector project_simplex(const Eigen::Ref<const Vector>& x, double demand) {
  const Eigen::Index n = x.size();
  if (demand <= 0.0) return Vector::Zero(n);

  // A point already on the simplex up to summation rounding is its own projection.
  const double abs_sum = x.cwiseAbs().sum();
  if (x.minCoeff() >= 0.0 &&
      std::abs(x.sum() - demand) <= 16.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                                         std::max(demand, abs_sum))
    return x;

  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>{});
  double running = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    running += sorted[static_cast<std::size_t>(j)];
    const double candidate = (running - demand) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

FlowVector project(const Eigen::Ref<const Vector>& x, const FeasibleSet& fs) {
  if (x.size() != fs.num_paths())
    throw DimensionError("project: vector has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(fs.num_paths()));
  FlowVector out(x.size());
  Vector block;
  for (std::size_t w = 0; w < fs.num_groups(); ++w) {
    const auto& g = fs.groups()[w];
    block.resize(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) block[static_cast<Eigen::Index>(i)] = x[g[i]];
    const Vector y = project_simplex(block, fs.demands()[static_cast<Eigen::Index>(w)]);
    for (std::size_t i = 0; i < g.size(); ++i) out[g[i]] = y[static_cast<Eigen::Index>(i)];
  }
  return out;
}

double diameter(const FeasibleSet& fs) {
  double sq = 0.0;
  for (std::size_t w = 0; w < fs.num_groups(); ++w) {
    if (fs.groups()[w].size() < 2) continue;
    const double d = fs.demands()[static_cast<Eigen::Index>(w)];
    sq += 2.0 * d * d;
  }
  return std::sqrt(sq);
}

CostRange cost_extrema(const GameSpec& spec) {
  const FeasibleSet fs = FeasibleSet::from_spec(spec);
  CostRange range;
  range.min = std::numeric_limits<double>::infinity();
  range.max = -std::numeric_limits<double>::infinity();
  auto absorb = [&](const FlowVector& h, const Eigen::Ref<const Vector>& u) {
    const Vector c = eval_cost(spec.cost, h, u);
    range.min = std::min(range.min, c.minCoeff());
    range.max = std::max(range.max, c.maxCoeff());
    ++range.evaluated;
  };

  const std::uint64_t h_count = fs.vertex_count();
  const auto* box = std::get_if<UniformBox>(&spec.uncertainty);
  const Eigen::Index m = dimension(spec.uncertainty);
  std::uint64_t u_count = 0;
  if (box != nullptr) {
    Eigen::Index free_coords = 0;
    for (Eigen::Index j = 0; j < m; ++j) free_coords += box->lo[j] != box->hi[j];
    u_count = free_coords >= 63 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << free_coords);
  } else {
    u_count = static_cast<std::uint64_t>(std::get<FiniteSamples>(spec.uncertainty).rows.rows());
  }

  const bool enumerate = h_count <= kVertexCap && u_count <= kVertexCap / h_count;
  if (enumerate) {
    const Matrix u_vertices = support_vertices(spec.uncertainty);
    for (std::uint64_t k = 0; k < h_count; ++k) {
      const FlowVector h = fs.vertex(k);
      for (Eigen::Index r = 0; r < u_vertices.rows(); ++r) absorb(h, u_vertices.row(r).transpose());
    }
    return range;
  }

  range.sampled = true;
  Stream pick(0xC057B0B5ULL, 0);
  Vector u(m);
  FlowVector h(fs.num_paths());
  for (std::uint64_t s = 0; s < kSampledVertexPairs; ++s) {
    h.setZero();
    for (std::size_t w = 0; w < fs.num_groups(); ++w) {
      const auto& g = fs.groups()[w];
      h[g[pick.next_below(g.size())]] = fs.demands()[static_cast<Eigen::Index>(w)];
    }
    if (box != nullptr) {
      for (Eigen::Index j = 0; j < m; ++j) u[j] = (pick.next_u64() & 1) ? box->hi[j] : box->lo[j];
    } else {
      const auto& rows = std::get<FiniteSamples>(spec.uncertainty).rows;
      u = rows.row(static_cast<Eigen::Index>(pick.next_below(static_cast<std::uint64_t>(rows.rows())))).transpose();
    }
    absorb(h, u);
  }
  return range;
}

}  // namespace cwe
