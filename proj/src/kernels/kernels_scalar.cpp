#include "cwe/kernels.hpp"

namespace cwe::kernels::scalar {

void affine_samples(double offset, std::span<const double> weights, const double* columns,
                    std::size_t column_stride, std::span<double> out) noexcept {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = offset;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double w = weights[j];
    const double* col = columns + j * column_stride;
    for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + w * col[i];
  }
}

double positive_part_sum(std::span<const double> z, double t) noexcept {
  double acc = 0.0;
  for (double v : z) {
    const double d = v - t;
    if (d > 0.0) acc += d;
  }
  return acc;
}

double sum(std::span<const double> z) noexcept {
  double acc = 0.0;
  for (double v : z) acc += v;
  return acc;
}

}  // namespace cwe::kernels::scalar
