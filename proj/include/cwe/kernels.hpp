#pragma once

// Data-parallel inner loops of the empirical CVaR evaluation.
//
// Every kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64 builds with CWE_HAVE_AVX2, an AVX2 variant in `kernels::avx2`. The
// unqualified functions dispatch to the best variant the running CPU supports.
//
// affine_samples is bit-identical across variants (same operation order, no
// FMA contraction). Reductions are reassociated in the AVX2 variant and agree
// with the scalar reference to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

namespace cwe::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when `isa` was compiled in and the CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Variant currently used by the dispatching functions.
Isa active_isa() noexcept;

/// Pin dispatch to `isa` (falls back to Scalar if unavailable). Returns the
/// variant actually selected.
Isa select_isa(Isa isa) noexcept;

/// out[i] = offset + sum_j weights[j] * columns[j * column_stride + i]
/// for i < out.size(). `columns` is a column-major block of weights.size()
/// columns, each at least out.size() long.
void affine_samples(double offset, std::span<const double> weights, const double* columns,
                    std::size_t column_stride, std::span<double> out) noexcept;

/// sum_i max(z[i] - t, 0)
double positive_part_sum(std::span<const double> z, double t) noexcept;

/// sum_i z[i]
double sum(std::span<const double> z) noexcept;

namespace scalar {
void affine_samples(double offset, std::span<const double> weights, const double* columns,
                    std::size_t column_stride, std::span<double> out) noexcept;
double positive_part_sum(std::span<const double> z, double t) noexcept;
double sum(std::span<const double> z) noexcept;
}  // namespace scalar

#if defined(CWE_HAVE_AVX2)
namespace avx2 {
void affine_samples(double offset, std::span<const double> weights, const double* columns,
                    std::size_t column_stride, std::span<double> out) noexcept;
double positive_part_sum(std::span<const double> z, double t) noexcept;
double sum(std::span<const double> z) noexcept;
}  // namespace avx2
#endif

}  // namespace cwe::kernels
