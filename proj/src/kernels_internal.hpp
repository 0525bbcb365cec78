#pragma once

#include "advrisk/kernels.hpp"

namespace advrisk::kernels::detail {

extern const KernelTable kScalarTable;

// Defined in kernels_avx2.cpp; nullptr when built without AVX2 support.
const KernelTable* avx2_table_if_compiled();

}  // namespace advrisk::kernels::detail
