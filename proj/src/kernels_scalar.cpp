#include "kernels_internal.hpp"

#include <cmath>
#include <limits>

namespace advrisk::kernels::detail {

namespace {

void csr_max_scalar(const std::uint32_t* offsets, const std::uint32_t* indices,
                    const double* values, double* out, std::size_t row_begin,
                    std::size_t row_end) {
  for (std::size_t r = row_begin; r < row_end; ++r) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      const double v = values[indices[k]];
      best = v > best ? v : best;
    }
    out[r] = best;
  }
}

void csr_min_scalar(const std::uint32_t* offsets, const std::uint32_t* indices,
                    const double* values, double* out, std::size_t row_begin,
                    std::size_t row_end) {
  for (std::size_t r = row_begin; r < row_end; ++r) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      const double v = values[indices[k]];
      best = v < best ? v : best;
    }
    out[r] = best;
  }
}

void elementwise_max_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] > b[i] ? a[i] : b[i];
}

double sqrt_product_sum_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(a[i] * b[i]);
  return acc;
}

}  // namespace

const KernelTable kScalarTable{
    Isa::kScalar, csr_max_scalar, csr_min_scalar, elementwise_max_scalar,
    sqrt_product_sum_scalar,
};

}  // namespace advrisk::kernels::detail
