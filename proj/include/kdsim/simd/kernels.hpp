#pragma once

// Data-parallel inner loops of the propagation and coherence engines.
//
// Each instruction set provides one KernelTable. The scalar table is the
// reference; vector tables must agree with it to rounding (see test_simd.cpp).
// active() picks the widest table the CPU supports, once, unless the
// KDSIM_SIMD environment variable names a specific one ("scalar", "avx2").

#include <complex>
#include <cstddef>
#include <string_view>

namespace kdsim::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  /// out[m] += amp * exp(i k (sqrt(d^2 + ell^2) - ell)), d = out_origin + m out_dx - x_src.
  void (*spherical_accumulate)(cplx* out, std::size_t n, double out_origin, double out_dx,
                               double x_src, cplx amp, double k, double ell);

  /// a[i] *= b[i]
  void (*complex_multiply)(cplx* a, const cplx* b, std::size_t n);

  /// u[i] *= exp(-i depth cos^2(kl (x_i - offset))), x_i = origin + i dx.
  void (*standing_wave_phase)(cplx* u, std::size_t n, double origin, double dx, double kl,
                              double offset, double depth);

  /// acc[i] += w |u[i]|^2
  void (*accumulate_intensity)(double* acc, const cplx* u, std::size_t n, double w);

  /// rho[i n + j] += w u[i] conj(u[j]) for rows i in [row_begin, row_end), all j.
  void (*rank1_update)(cplx* rho, const cplx* u, std::size_t n, std::size_t row_begin,
                       std::size_t row_end, double w);

  /// sum |u[i]|^2
  double (*norm2)(const cplx* u, std::size_t n);

  /// s[i] = sin(x[i]), c[i] = cos(x[i])
  void (*sincos)(const double* x, double* s, double* c, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(KDSIM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

/// True when the table is compiled in and the running CPU can execute it.
bool supported(Isa isa);

/// Throws std::runtime_error when the ISA is not supported.
const KernelTable& table(Isa isa);

/// Table selected for this process.
const KernelTable& active();

std::string_view to_string(Isa isa);

}  // namespace kdsim::simd
