#include <cmath>

#include "kdsim/simd/kernels.hpp"

namespace kdsim::simd {

namespace {

void spherical_accumulate(cplx* out, std::size_t n, double out_origin, double out_dx, double x_src,
                          cplx amp, double k, double ell) {
  for (std::size_t m = 0; m < n; ++m) {
    const double d = out_origin + static_cast<double>(m) * out_dx - x_src;
    const double d2 = d * d;
    // sqrt(d^2 + l^2) - l without cancellation
    const double phase = k * d2 / (std::sqrt(d2 + ell * ell) + ell);
    out[m] += amp * cplx(std::cos(phase), std::sin(phase));
  }
}

void complex_multiply(cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    const double im = a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    a[i] = cplx(re, im);
  }
}

void standing_wave_phase(cplx* u, std::size_t n, double origin, double dx, double kl, double offset,
                         double depth) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = origin + static_cast<double>(i) * dx - offset;
    // cos^2 t = (1 + cos 2t) / 2
    const double phase = -0.5 * depth * (1.0 + std::cos(2.0 * kl * x));
    const double c = std::cos(phase), s = std::sin(phase);
    const double re = u[i].real() * c - u[i].imag() * s;
    const double im = u[i].real() * s + u[i].imag() * c;
    u[i] = cplx(re, im);
  }
}

void accumulate_intensity(double* acc, const cplx* u, std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i)
    acc[i] += w * (u[i].real() * u[i].real() + u[i].imag() * u[i].imag());
}

void rank1_update(cplx* rho, const cplx* u, std::size_t n, std::size_t row_begin, std::size_t row_end,
                  double w) {
  for (std::size_t i = row_begin; i < row_end; ++i) {
    const double ar = w * u[i].real(), ai = w * u[i].imag();
    cplx* row = rho + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double br = u[j].real(), bi = -u[j].imag();
      row[j] += cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
  }
}

double norm2(const cplx* u, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += u[i].real() * u[i].real() + u[i].imag() * u[i].imag();
  return s;
}

void sincos(const double* x, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::scalar,        "scalar",     spherical_accumulate,
                             complex_multiply,   standing_wave_phase,
                             accumulate_intensity, rank1_update, norm2, sincos};
  return t;
}

}  // namespace kdsim::simd
