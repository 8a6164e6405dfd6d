#include "kdsim/propagation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "kdsim/errors.hpp"
#include "kdsim/simd/kernels.hpp"

namespace kdsim {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : size(n), data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  cplx* c() { return reinterpret_cast<cplx*>(data); }
  std::size_t size;
  fftw_complex* data;
};

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Sparse inputs: evaluate the discrete sum directly.
std::size_t count_nonzero(std::span<const cplx> u, std::size_t limit) {
  std::size_t n = 0;
  for (const auto& a : u)
    if (a != cplx{}) {
      if (++n > limit) break;
    }
  return n;
}

constexpr std::size_t kSparseLimit = 16;

}  // namespace

double max_separation(const PlaneGrid& in, const PlaneGrid& out) { return 0.5 * (in.window + out.window); }

double max_chirp_spacing(double lambda, double distance, double separation) {
  return lambda * distance / (2.0 * separation);
}

void check_sampling(const PlaneGrid& in, const PlaneGrid& out, double lambda, double distance,
                    SamplingScope scope, std::string_view leg_name) {
  if (!(distance > 0.0)) throw DomainError(std::string(leg_name) + ": propagation distance must be positive");
  const double limit = max_chirp_spacing(lambda, distance, max_separation(in, out));
  auto fail = [&](const PlaneGrid& g, const char* which) {
    const auto required = next_pow2(static_cast<std::size_t>(std::ceil(g.window / limit)));
    std::ostringstream msg;
    msg << "sampling criterion violated on leg " << leg_name << " (" << which << " plane): spacing "
        << g.spacing() << " m exceeds lambda*l/(2*D) = " << limit << " m; need at least " << required
        << " samples over the " << g.window << " m window";
    throw SamplingError(msg.str(), static_cast<long>(required));
  };
  if (in.spacing() > limit) fail(in, "input");
  if (scope == SamplingScope::input_and_output && out.spacing() > limit) fail(out, "output");
}

// ---------------------------------------------------------------------------
// FresnelPlan
//
// With x_n = a + n di and x_m = b + m do, c = b - a, beta = pi / (lambda ell):
//   (x_m - x_n)^2 = c^2 + 2 c m do - 2 c n di + m^2 do^2 + n^2 di^2 - 2 m n do di
// and -2 m n = (m - n)^2 - m^2 - n^2 turns the sum into a chirp convolution.

struct FresnelPlan::Impl {
  std::size_t n_in = 0, n_out = 0, fft_len = 0;
  std::vector<cplx> pre;       // applied to the input
  std::vector<cplx> post;      // applied to the output, includes dx_in
  std::vector<cplx> kernel;    // FFT of the chirp, scaled by 1/fft_len
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

FresnelPlan::FresnelPlan(const PlaneGrid& in, const PlaneGrid& out, double lambda, double distance)
    : in_(in), out_(out), impl_(std::make_unique<Impl>()) {
  if (!(lambda > 0.0) || !(distance > 0.0)) throw DomainError("FresnelPlan: lambda and distance must be positive");
  auto& p = *impl_;
  p.n_in = in.samples;
  p.n_out = out.samples;
  p.fft_len = next_pow2(p.n_in + p.n_out - 1);

  const double beta = kPi / (lambda * distance);
  const double di = in.spacing(), dout = out.spacing();
  const double c = out.origin() - in.origin();
  const double cross = dout * di;

  p.pre.resize(p.n_in);
  for (std::size_t n = 0; n < p.n_in; ++n) {
    const double nn = static_cast<double>(n);
    // (x_n^2 terms) - the Bluestein share of the cross term
    p.pre[n] = expi(beta * (nn * nn * (di * di - cross) - 2.0 * c * nn * di));
  }
  p.post.resize(p.n_out);
  for (std::size_t m = 0; m < p.n_out; ++m) {
    const double mm = static_cast<double>(m);
    p.post[m] = di * expi(beta * (c * c + mm * mm * (dout * dout - cross) + 2.0 * c * mm * dout));
  }

  FftwBuffer h(p.fft_len);
  std::fill(h.c(), h.c() + p.fft_len, cplx{});
  const auto L = static_cast<long long>(p.fft_len);
  for (long long j = -static_cast<long long>(p.n_in) + 1; j < static_cast<long long>(p.n_out); ++j) {
    const double jj = static_cast<double>(j);
    h.c()[(j % L + L) % L] = expi(beta * cross * jj * jj);
  }

  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    p.forward = fftw_plan_dft_1d(static_cast<int>(p.fft_len), h.data, h.data, FFTW_FORWARD, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_1d(static_cast<int>(p.fft_len), h.data, h.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute_dft(p.forward, h.data, h.data);
  const double scale = 1.0 / static_cast<double>(p.fft_len);
  p.kernel.assign(h.c(), h.c() + p.fft_len);
  for (auto& k : p.kernel) k *= scale;
}

FresnelPlan::~FresnelPlan() = default;

void FresnelPlan::execute(std::span<const cplx> in, std::span<cplx> out) const {
  const auto& p = *impl_;
  if (in.size() != p.n_in || out.size() != p.n_out) throw DomainError("FresnelPlan::execute: size mismatch");
  const auto& k = simd::active();
  FftwBuffer buf(p.fft_len);
  cplx* b = buf.c();
  std::copy(in.begin(), in.end(), b);
  std::fill(b + p.n_in, b + p.fft_len, cplx{});
  k.complex_multiply(b, p.pre.data(), p.n_in);
  fftw_execute_dft(p.forward, buf.data, buf.data);
  k.complex_multiply(b, p.kernel.data(), p.fft_len);
  fftw_execute_dft(p.backward, buf.data, buf.data);
  std::copy(b, b + p.n_out, out.begin());
  k.complex_multiply(out.data(), p.post.data(), p.n_out);
}

// ---------------------------------------------------------------------------

Propagator::Propagator(const PlaneGrid& in, const PlaneGrid& out, double lambda, double distance,
                       PropagationMethod method, Plane out_plane)
    : in_(in), out_(out), lambda_(lambda), distance_(distance), method_(method), out_plane_(out_plane) {
  const auto scope = out_plane == Plane::screen ? SamplingScope::input_only : SamplingScope::input_and_output;
  check_sampling(in, out, lambda, distance, scope, std::string("to ") + std::string(to_string(out_plane)));
  if (method == PropagationMethod::fresnel) plan_ = std::make_shared<const FresnelPlan>(in, out, lambda, distance);
}

WaveField Propagator::apply(const WaveField& field, bool normalize) const {
  if (field.size() != in_.samples || std::abs(field.spacing - in_.spacing()) > 1e-12 * in_.spacing())
    throw DomainError("Propagator: field does not match the input grid");

  WaveField out(out_, out_plane_, lambda_);
  const double k = 2.0 * kPi / lambda_;
  const double dx_in = field.spacing;
  const auto& table = simd::active();
  const std::span<const cplx> u(field.amplitudes);

  if (method_ == PropagationMethod::exact) {
    for (std::size_t n = 0; n < field.size(); ++n) {
      if (u[n] == cplx{}) continue;
      table.spherical_accumulate(out.amplitudes.data(), out.size(), out.origin, out.spacing, field.x(n),
                                 u[n] * dx_in, k, distance_);
    }
  } else if (count_nonzero(u, kSparseLimit) <= kSparseLimit) {
    const double beta = kPi / (lambda_ * distance_);
    for (std::size_t n = 0; n < field.size(); ++n) {
      if (u[n] == cplx{}) continue;
      const cplx amp = u[n] * dx_in;
      const double xn = field.x(n);
      for (std::size_t m = 0; m < out.size(); ++m) {
        const double d = out.x(m) - xn;
        out.amplitudes[m] += amp * expi(beta * d * d);
      }
    }
  } else {
    plan_->execute(u, out.amplitudes);
  }
  if (normalize) out.normalize();
  return out;
}

WaveField propagate(const WaveField& field, double distance, PropagationMethod method, const PlaneGrid& out_grid,
                    Plane out_plane) {
  const PlaneGrid in = field.grid();
  if (std::abs(field.origin - in.origin()) > 1e-9 * in.spacing())
    throw DomainError("propagate: field grid must be centred on the axis");
  return Propagator(in, out_grid, field.lambda_dB, distance, method, out_plane)(field);
}

WaveField propagate(const WaveField& field, double distance, PropagationMethod method) {
  return propagate(field, distance, method, field.grid(), field.plane);
}

}  // namespace kdsim
