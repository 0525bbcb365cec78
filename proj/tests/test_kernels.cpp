#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "advrisk/kernels.hpp"

using namespace advrisk;

namespace {

struct Csr {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> indices;
};

// Rows of random length 0..20, including empty rows.
Csr random_csr(std::mt19937_64& rng, std::size_t rows, std::size_t n) {
  Csr c;
  std::uniform_int_distribution<std::size_t> len(0, 20);
  std::uniform_int_distribution<std::uint32_t> idx(0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t k = len(rng);
    for (std::size_t t = 0; t < k; ++t) c.indices.push_back(idx(rng));
    c.offsets.push_back(static_cast<std::uint32_t>(c.indices.size()));
  }
  return c;
}

std::vector<double> values_with_infinities(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i % 17 == 3 ? INFINITY : (i % 19 == 5 ? -INFINITY : u(rng));
  }
  return v;
}

}  // namespace

TEST_CASE("active table reports a supported instruction set") {
  const kernels::KernelTable& t = kernels::active();
  if (kernels::avx2_table()) {
    CHECK(t.isa == kernels::Isa::kAvx2);
  } else {
    CHECK(t.isa == kernels::Isa::kScalar);
  }
  CHECK(kernels::isa_name(kernels::Isa::kScalar) == "scalar");
}

TEST_CASE("scalar csr kernels on a hand example") {
  const std::vector<std::uint32_t> offsets{0, 2, 2, 5};
  const std::vector<std::uint32_t> indices{0, 1, 0, 1, 2};
  const std::vector<double> values{0.0, 1.0, 2.0};
  std::vector<double> out(3);
  kernels::scalar_table().csr_max(offsets.data(), indices.data(), values.data(), out.data(), 0, 3);
  CHECK(out == std::vector<double>{1.0, -INFINITY, 2.0});
  kernels::scalar_table().csr_min(offsets.data(), indices.data(), values.data(), out.data(), 0, 3);
  CHECK(out == std::vector<double>{0.0, INFINITY, 0.0});
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const kernels::KernelTable* avx = kernels::avx2_table();
  if (!avx) {
    MESSAGE("AVX2 not available; equivalence check skipped");
    return;
  }
  const kernels::KernelTable& ref = kernels::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 3u, 4u, 5u, 64u, 1001u}) {
    const auto values = values_with_infinities(rng, n);
    const Csr c = random_csr(rng, 300, n);
    std::vector<double> a(300), b(300);
    ref.csr_max(c.offsets.data(), c.indices.data(), values.data(), a.data(), 0, 300);
    avx->csr_max(c.offsets.data(), c.indices.data(), values.data(), b.data(), 0, 300);
    CHECK(a == b);
    ref.csr_min(c.offsets.data(), c.indices.data(), values.data(), a.data(), 17, 299);
    avx->csr_min(c.offsets.data(), c.indices.data(), values.data(), b.data(), 17, 299);
    CHECK(std::vector<double>(a.begin() + 17, a.begin() + 299) ==
          std::vector<double>(b.begin() + 17, b.begin() + 299));

    const auto other = values_with_infinities(rng, n);
    std::vector<double> m1(n), m2(n);
    ref.elementwise_max(values.data(), other.data(), m1.data(), n);
    avx->elementwise_max(values.data(), other.data(), m2.data(), n);
    CHECK(m1 == m2);

    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = i % 3 == 0 ? 0.0 : u(rng);
      q[i] = u(rng);
    }
    const double s1 = ref.sqrt_product_sum(p.data(), q.data(), n);
    const double s2 = avx->sqrt_product_sum(p.data(), q.data(), n);
    CHECK(s2 == doctest::Approx(s1).epsilon(1e-14));
  }
}

TEST_CASE("force_isa switches the active table") {
  REQUIRE(kernels::force_isa(kernels::Isa::kScalar));
  CHECK(kernels::active().isa == kernels::Isa::kScalar);
  if (kernels::avx2_table()) {
    CHECK(kernels::force_isa(kernels::Isa::kAvx2));
    CHECK(kernels::active().isa == kernels::Isa::kAvx2);
  } else {
    CHECK_FALSE(kernels::force_isa(kernels::Isa::kAvx2));
  }
}
