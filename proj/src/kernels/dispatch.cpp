#include <atomic>

#include "cwe/kernels.hpp"

namespace cwe::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(CWE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() noexcept { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Avx2:
      return "avx2";
    case Isa::Scalar:
      break;
  }
  return "scalar";
}

bool isa_available(Isa isa) noexcept {
  if (isa == Isa::Scalar) return true;
  return cpu_has_avx2();
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

Isa select_isa(Isa isa) noexcept {
  const Isa chosen = isa_available(isa) ? isa : Isa::Scalar;
  current().store(chosen, std::memory_order_relaxed);
  return chosen;
}

void affine_samples(double offset, std::span<const double> weights, const double* columns,
                    std::size_t column_stride, std::span<double> out) noexcept {
#if defined(CWE_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::affine_samples(offset, weights, columns, column_stride, out);
#endif
  scalar::affine_samples(offset, weights, columns, column_stride, out);
}

double positive_part_sum(std::span<const double> z, double t) noexcept {
#if defined(CWE_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::positive_part_sum(z, t);
#endif
  return scalar::positive_part_sum(z, t);
}

double sum(std::span<const double> z) noexcept {
#if defined(CWE_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::sum(z);
#endif
  return scalar::sum(z);
}

}  // namespace cwe::kernels
