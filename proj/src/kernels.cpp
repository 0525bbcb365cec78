#include "advrisk/kernels.hpp"

#include <atomic>

#include "kernels_internal.hpp"

namespace advrisk::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* best_table() {
  if (const KernelTable* t = avx2_table()) return t;
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{best_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* avx2_table() {
  static const KernelTable* table = cpu_has_avx2() ? detail::avx2_table_if_compiled() : nullptr;
  return table;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

bool force_isa(Isa isa) {
  const KernelTable* t = isa == Isa::kAvx2 ? avx2_table() : &detail::kScalarTable;
  if (t == nullptr) return false;
  active_slot().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace advrisk::kernels
