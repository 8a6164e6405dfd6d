#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kdsim/simd/kernels.hpp"

namespace kdsim::simd {

namespace {

bool cpu_has_avx2() {
#if defined(KDSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  if (const char* env = std::getenv("KDSIM_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return scalar_table();
    if (want == "avx2") return table(Isa::avx2);
    throw std::runtime_error("KDSIM_SIMD: unknown instruction set '" + want + "'");
  }
  if (supported(Isa::avx2)) return table(Isa::avx2);
  return scalar_table();
}

}  // namespace

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw std::runtime_error("instruction set not available: " + std::string(to_string(isa)));
#if defined(KDSIM_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2_table();
#endif
  return scalar_table();
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace kdsim::simd
