#include "kernels_internal.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace advrisk::kernels::detail {

namespace {

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  const __m128d s = _mm_max_pd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(s);
}

inline double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  const __m128d s = _mm_min_pd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(s);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void csr_max_avx2(const std::uint32_t* offsets, const std::uint32_t* indices,
                  const double* values, double* out, std::size_t row_begin,
                  std::size_t row_end) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (std::size_t r = row_begin; r < row_end; ++r) {
    std::uint32_t k = offsets[r];
    const std::uint32_t end = offsets[r + 1];
    __m256d acc = _mm256_set1_pd(neg_inf);
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(indices + k));
      acc = _mm256_max_pd(_mm256_i32gather_pd(values, idx, 8), acc);
    }
    double best = hmax(acc);
    for (; k < end; ++k) {
      const double v = values[indices[k]];
      best = v > best ? v : best;
    }
    out[r] = best;
  }
}

void csr_min_avx2(const std::uint32_t* offsets, const std::uint32_t* indices,
                  const double* values, double* out, std::size_t row_begin,
                  std::size_t row_end) {
  const double pos_inf = std::numeric_limits<double>::infinity();
  for (std::size_t r = row_begin; r < row_end; ++r) {
    std::uint32_t k = offsets[r];
    const std::uint32_t end = offsets[r + 1];
    __m256d acc = _mm256_set1_pd(pos_inf);
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(indices + k));
      acc = _mm256_min_pd(_mm256_i32gather_pd(values, idx, 8), acc);
    }
    double best = hmin(acc);
    for (; k < end; ++k) {
      const double v = values[indices[k]];
      best = v < best ? v : best;
    }
    out[r] = best;
  }
}

void elementwise_max_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // maxpd(x, y) returns y unless x > y, matching the scalar select.
    _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] > b[i] ? a[i] : b[i];
}

double sqrt_product_sum_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(p));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += std::sqrt(a[i] * b[i]);
  return total;
}

const KernelTable kAvx2Table{
    Isa::kAvx2, csr_max_avx2, csr_min_avx2, elementwise_max_avx2, sqrt_product_sum_avx2,
};

}  // namespace

const KernelTable* avx2_table_if_compiled() { return &kAvx2Table; }

}  // namespace advrisk::kernels::detail

#else

namespace advrisk::kernels::detail {
const KernelTable* avx2_table_if_compiled() { return nullptr; }
}  // namespace advrisk::kernels::detail

#endif
