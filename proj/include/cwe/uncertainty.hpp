#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "cwe/types.hpp"

namespace cwe {

/// Independent coordinates, u_j ~ U[lo_j, hi_j].
struct UniformBox {
  Vector lo;
  Vector hi;
};

/// Empirical distribution over stored draws (one draw per row).
struct FiniteSamples {
  Matrix rows;
};

using UncertaintyModel = std::variant<UniformBox, FiniteSamples>;

/// N i.i.d. draws, one per row of `draws` (column-major, so each coordinate is
/// a contiguous column).
struct SampleSet {
  Matrix draws;
  std::uint64_t seed = 0;

  Eigen::Index size() const noexcept { return draws.rows(); }
  Eigen::Index dimension() const noexcept { return draws.cols(); }
};

/// Dimension m of the uncertainty vector.
Eigen::Index dimension(const UncertaintyModel& model) noexcept;

/// Empty when the model is well formed; otherwise a description of the first problem.
std::vector<std::string> check_model(const UncertaintyModel& model);

/// Draw n samples. UniformBox coordinate j uses stream j of `seed`;
/// FiniteSamples picks rows uniformly with replacement from stream 0.
/// Throws DomainError when n == 0.
SampleSet sample(const UncertaintyModel& model, Eigen::Index n, std::uint64_t seed);

/// Box corners (2^m of them) or the stored rows, one point per row of the result.
/// Throws UnsupportedError for a UniformBox with m > kMaxVertexDimension.
constexpr Eigen::Index kMaxVertexDimension = 20;
Matrix support_vertices(const UncertaintyModel& model);

/// Support membership. UniformBox uses an absolute slack of `tol`; FiniteSamples
/// requires a stored row within `tol` in every coordinate.
bool in_support(const UncertaintyModel& model, const Eigen::Ref<const Vector>& point,
                double tol = 1e-12);

/// Headerless CSV, one draw per line, m comma-separated reals per line.
FiniteSamples load_samples_csv(const std::filesystem::path& path);

}  // namespace cwe
