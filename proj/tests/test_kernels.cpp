#include "doctest.h"

#include <random>
#include <vector>

#include "cwe/kernels.hpp"

using namespace cwe;

namespace {

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double lo = -50.0, double hi = 50.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::select_isa(saved); }
};

}  // namespace

TEST_CASE("scalar reference kernels on hand-sized inputs") {
  const std::vector<double> cols = {1, 2, 3, 10, 20, 30};  // two columns of three
  const std::vector<double> w = {2.0, -1.0};
  std::vector<double> out(3);
  kernels::scalar::affine_samples(5.0, w, cols.data(), 3, out);
  CHECK(out == std::vector<double>{-3.0, -11.0, -19.0});

  const std::vector<double> z = {1, 2, 3, 4, 5};
  CHECK(kernels::scalar::positive_part_sum(z, 3.0) == 3.0);
  CHECK(kernels::scalar::positive_part_sum(z, 10.0) == 0.0);
  CHECK(kernels::scalar::sum(z) == 15.0);
  CHECK(kernels::scalar::sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("select_isa falls back to scalar when a variant is unavailable") {
  IsaGuard guard;
  CHECK(kernels::select_isa(kernels::Isa::Scalar) == kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  const auto chosen = kernels::select_isa(kernels::Isa::Avx2);
  CHECK(chosen == (kernels::isa_available(kernels::Isa::Avx2) ? kernels::Isa::Avx2 : kernels::Isa::Scalar));
  CHECK(kernels::isa_name(kernels::Isa::Scalar) == "scalar");
}

#if defined(CWE_HAVE_AVX2)
TEST_CASE("avx2 kernels match the scalar reference") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) {
    MESSAGE("CPU lacks AVX2/FMA; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(20240611);
  // Sizes straddle the 4- and 8-lane loop boundaries.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 1000u, 5003u}) {
    for (std::size_t m : {0u, 1u, 2u, 5u}) {
      const auto cols = random_values(n * m, rng);
      const auto w = random_values(m, rng, -3.0, 3.0);
      std::vector<double> a(n), b(n);
      kernels::scalar::affine_samples(1.25, w, cols.data(), n, a);
      kernels::avx2::affine_samples(1.25, w, cols.data(), n, b);
      CHECK(a == b);  // bit-identical by construction
    }
    const auto z = random_values(n, rng);
    for (double t : {-100.0, -3.5, 0.0, 12.0, 100.0}) {
      const double s = kernels::scalar::positive_part_sum(z, t);
      const double v = kernels::avx2::positive_part_sum(z, t);
      CHECK(v == doctest::Approx(s).epsilon(1e-12));
    }
    CHECK(kernels::avx2::sum(z) == doctest::Approx(kernels::scalar::sum(z)).epsilon(1e-12).scale(1e3));
  }
}

TEST_CASE("dispatching functions route to the selected variant") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) return;
  IsaGuard guard;
  std::mt19937_64 rng(7);
  const auto z = random_values(4097, rng);
  kernels::select_isa(kernels::Isa::Scalar);
  const double s = kernels::positive_part_sum(z, 1.0);
  CHECK(s == kernels::scalar::positive_part_sum(z, 1.0));
  kernels::select_isa(kernels::Isa::Avx2);
  CHECK(kernels::positive_part_sum(z, 1.0) == kernels::avx2::positive_part_sum(z, 1.0));
}
#endif
