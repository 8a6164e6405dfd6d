// AVX2 + FMA kernels. Compiled with -mavx2 -mfma; only reached after a
// runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include <cmath>

#include "kdsim/simd/kernels.hpp"

namespace kdsim::simd {

namespace {

// pi/2 split into three doubles; with FMA each product is subtracted exactly
// before a single rounding, good for |x| up to ~1e9.
constexpr double kPio2Hi = 1.5707963267948966;
constexpr double kPio2Mid = 6.123233995736766e-17;
constexpr double kPio2Lo = -1.4973849048591698e-33;
constexpr double kTwoOverPi = 0.6366197723675814;

// fdlibm minimax coefficients on [-pi/4, pi/4].
constexpr double S1 = -1.66666666666666324348e-01;
constexpr double S2 = 8.33333333332248946124e-03;
constexpr double S3 = -1.98412698298579493134e-04;
constexpr double S4 = 2.75573137070700676789e-06;
constexpr double S5 = -2.50507602534068634195e-08;
constexpr double S6 = 1.58969099521155010221e-10;
constexpr double C1 = 4.16666666666666019037e-02;
constexpr double C2 = -1.38888888888741095749e-03;
constexpr double C3 = 2.48015872894767294178e-05;
constexpr double C4 = -2.75573143513906633035e-07;
constexpr double C5 = 2.08757232129817482790e-09;
constexpr double C6 = -1.13596475577881948265e-11;

struct SinCos {
  __m256d s, c;
};

inline SinCos sincos_pd(__m256d x) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_fmadd_pd(z, _mm256_set1_pd(S6), _mm256_set1_pd(S5));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S4));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S3));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S2));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S1));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  __m256d pc = _mm256_fmadd_pd(z, _mm256_set1_pd(C6), _mm256_set1_pd(C5));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C4));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C3));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C2));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C1));
  const __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  // Quadrant bookkeeping on q mod 4.
  const __m256i qi = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(q));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256i zero = _mm256_setzero_si256();
  const __m256d swap =
      _mm256_castsi256_pd(_mm256_xor_si256(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), zero),
                                           _mm256_set1_epi64x(-1)));
  const __m256i sin_neg = _mm256_slli_epi64(_mm256_and_si256(qi, two), 62);
  const __m256i cos_neg = _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one), two), 62);

  SinCos out;
  out.s = _mm256_blendv_pd(sin_r, cos_r, swap);
  out.c = _mm256_blendv_pd(cos_r, sin_r, swap);
  out.s = _mm256_xor_pd(out.s, _mm256_castsi256_pd(sin_neg));
  out.c = _mm256_xor_pd(out.c, _mm256_castsi256_pd(cos_neg));
  return out;
}

// (re0..re3), (im0..im3) -> [re0 im0 re1 im1], [re2 im2 re3 im3]
inline void interleave(__m256d re, __m256d im, __m256d& lo, __m256d& hi) {
  const __m256d a = _mm256_unpacklo_pd(re, im);
  const __m256d b = _mm256_unpackhi_pd(re, im);
  lo = _mm256_permute2f128_pd(a, b, 0x20);
  hi = _mm256_permute2f128_pd(a, b, 0x31);
}

// Two interleaved complex numbers per register: a * b.
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline double* dptr(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* dptr(const cplx* p) { return reinterpret_cast<const double*>(p); }

void spherical_accumulate(cplx* out, std::size_t n, double out_origin, double out_dx, double x_src,
                          cplx amp, double k, double ell) {
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d vell = _mm256_set1_pd(ell);
  const __m256d vell2 = _mm256_set1_pd(ell * ell);
  const __m256d vdx = _mm256_set1_pd(out_dx);
  const __m256d vorg = _mm256_set1_pd(out_origin);
  const __m256d vsrc = _mm256_set1_pd(x_src);
  const __m256d ar = _mm256_set1_pd(amp.real());
  const __m256d ai = _mm256_set1_pd(amp.imag());
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  std::size_t m = 0;
  for (; m + 4 <= n; m += 4) {
    const __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(m)), lane);
    const __m256d d = _mm256_sub_pd(_mm256_fmadd_pd(idx, vdx, vorg), vsrc);
    const __m256d d2 = _mm256_mul_pd(d, d);
    const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(d2, vell2));
    const __m256d phase = _mm256_div_pd(_mm256_mul_pd(vk, d2), _mm256_add_pd(r, vell));
    const SinCos sc = sincos_pd(phase);
    const __m256d re = _mm256_fmsub_pd(ar, sc.c, _mm256_mul_pd(ai, sc.s));
    const __m256d im = _mm256_fmadd_pd(ar, sc.s, _mm256_mul_pd(ai, sc.c));
    __m256d lo, hi;
    interleave(re, im, lo, hi);
    double* o = dptr(out + m);
    _mm256_storeu_pd(o, _mm256_add_pd(_mm256_loadu_pd(o), lo));
    _mm256_storeu_pd(o + 4, _mm256_add_pd(_mm256_loadu_pd(o + 4), hi));
  }
  for (; m < n; ++m) {
    const double d = out_origin + static_cast<double>(m) * out_dx - x_src;
    const double d2 = d * d;
    const double phase = k * d2 / (std::sqrt(d2 + ell * ell) + ell);
    out[m] += amp * cplx(std::cos(phase), std::sin(phase));
  }
}

void complex_multiply(cplx* a, const cplx* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(dptr(a + i));
    const __m256d vb = _mm256_loadu_pd(dptr(b + i));
    _mm256_storeu_pd(dptr(a + i), cmul(va, vb));
  }
  for (; i < n; ++i) a[i] *= b[i];
}

void standing_wave_phase(cplx* u, std::size_t n, double origin, double dx, double kl, double offset,
                         double depth) {
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vbase = _mm256_set1_pd(origin - offset);
  const __m256d two_kl = _mm256_set1_pd(2.0 * kl);
  const __m256d half_depth = _mm256_set1_pd(-0.5 * depth);
  const __m256d one = _mm256_set1_pd(1.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
    const __m256d x = _mm256_fmadd_pd(idx, vdx, vbase);
    const SinCos grating = sincos_pd(_mm256_mul_pd(two_kl, x));
    const __m256d phase = _mm256_mul_pd(half_depth, _mm256_add_pd(one, grating.c));
    const SinCos e = sincos_pd(phase);
    __m256d lo, hi;
    interleave(e.c, e.s, lo, hi);
    double* p = dptr(u + i);
    _mm256_storeu_pd(p, cmul(_mm256_loadu_pd(p), lo));
    _mm256_storeu_pd(p + 4, cmul(_mm256_loadu_pd(p + 4), hi));
  }
  for (; i < n; ++i) {
    const double x = origin + static_cast<double>(i) * dx - offset;
    const double phase = -0.5 * depth * (1.0 + std::cos(2.0 * kl * x));
    u[i] *= cplx(std::cos(phase), std::sin(phase));
  }
}

void accumulate_intensity(double* acc, const cplx* u, std::size_t n, double w) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(dptr(u + i));
    const __m256d b = _mm256_loadu_pd(dptr(u + i + 2));
    // hadd gives |u0|^2 |u2|^2 |u1|^2 |u3|^2
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m256d mag = _mm256_permute4x64_pd(h, 0b11011000);
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(vw, mag, _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] += w * std::norm(u[i]);
}

void rank1_update(cplx* rho, const cplx* u, std::size_t n, std::size_t row_begin, std::size_t row_end,
                  double w) {
  for (std::size_t i = row_begin; i < row_end; ++i) {
    const double ar = w * u[i].real(), ai = w * u[i].imag();
    // a conj(b) = [ar br + ai bi, ai br - ar bi]
    const __m256d alt = _mm256_set_pd(-ar, ar, -ar, ar);
    const __m256d vai = _mm256_set1_pd(ai);
    cplx* row = rho + i * n;
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      const __m256d b = _mm256_loadu_pd(dptr(u + j));
      const __m256d b_sw = _mm256_permute_pd(b, 0x5);
      const __m256d prod = _mm256_fmadd_pd(vai, b_sw, _mm256_mul_pd(alt, b));
      double* r = dptr(row + j);
      _mm256_storeu_pd(r, _mm256_add_pd(_mm256_loadu_pd(r), prod));
    }
    for (; j < n; ++j) {
      const double br = u[j].real(), bi = -u[j].imag();
      row[j] += cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
  }
}

double norm2(const cplx* u, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(dptr(u + i));
    acc = _mm256_fmadd_pd(a, a, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += std::norm(u[i]);
  return s;
}

void sincos(const double* x, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const SinCos sc = sincos_pd(_mm256_loadu_pd(x + i));
    _mm256_storeu_pd(s + i, sc.s);
    _mm256_storeu_pd(c + i, sc.c);
  }
  for (; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{Isa::avx2,        "avx2",       spherical_accumulate,
                             complex_multiply, standing_wave_phase,
                             accumulate_intensity, rank1_update, norm2, sincos};
  return t;
}

}  // namespace kdsim::simd
