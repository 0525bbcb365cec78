#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference version; an
// AVX2 version is selected at runtime when the CPU supports it. The two must
// agree exactly for max/min kernels and to rounding for the reductions.
namespace advrisk::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // out[r] = max over values[indices[offsets[r] .. offsets[r+1])] for r in [row_begin, row_end).
  // Empty rows produce -inf.
  void (*csr_max)(const std::uint32_t* offsets, const std::uint32_t* indices,
                  const double* values, double* out, std::size_t row_begin,
                  std::size_t row_end);

  // Same with min; empty rows produce +inf.
  void (*csr_min)(const std::uint32_t* offsets, const std::uint32_t* indices,
                  const double* values, double* out, std::size_t row_begin,
                  std::size_t row_end);

  // out[i] = (a[i] > b[i]) ? a[i] : b[i]
  void (*elementwise_max)(const double* a, const double* b, double* out, std::size_t n);

  // sum_i sqrt(a[i] * b[i])
  double (*sqrt_product_sum)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();

// The table used by the library. Defaults to the best supported ISA.
const KernelTable& active();

// Pins the active table (tests and benchmarks). Returns false if unsupported.
bool force_isa(Isa isa);

}  // namespace advrisk::kernels
