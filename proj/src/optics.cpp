#include "kdsim/optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kdsim/errors.hpp"
#include "kdsim/simd/kernels.hpp"

namespace kdsim {

WaveField point_source(double chi, const PlaneGrid& grid, double lambda_dB) {
  if (!(std::abs(chi) < 0.5 * grid.window)) {
    std::ostringstream msg;
    msg << "point_source: chi = " << chi << " m lies outside the source window of half-width "
        << 0.5 * grid.window << " m";
    throw DomainError(msg.str());
  }
  WaveField f(grid, Plane::source, lambda_dB);
  const double pos = (chi - f.origin) / f.spacing;
  auto idx = static_cast<std::size_t>(std::llround(pos));
  if (idx >= f.size()) idx = f.size() - 1;
  f.amplitudes[idx] = 1.0;
  return f;
}

WaveField apply_gaussian_slit(WaveField field, double width) {
  if (!(width > 0.0)) throw DomainError("apply_gaussian_slit: width must be positive");
  const double inv = 1.0 / (2.0 * width * width);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double x = field.x(i);
    field.amplitudes[i] *= std::exp(-x * x * inv);
  }
  field.plane = Plane::slit2;
  return field;
}

double ponderomotive_depth(double intensity, double lambda_laser) {
  if (intensity < 0.0) throw DomainError("ponderomotive_depth: intensity must be >= 0");
  if (!(lambda_laser > 0.0)) throw DomainError("ponderomotive_depth: wavelength must be positive");
  const double omega = 2.0 * std::numbers::pi * K::c / lambda_laser;
  return K::e * K::e * intensity / (2.0 * K::m_e * K::eps0 * K::c * omega * omega);
}

LaserGrating make_grating(double intensity, double lambda_laser, double t_ell, double offset) {
  if (t_ell < 0.0) throw DomainError("make_grating: crossing time must be >= 0");
  LaserGrating g;
  g.V0 = ponderomotive_depth(intensity, lambda_laser);
  g.k_laser = 2.0 * std::numbers::pi / lambda_laser;
  g.t_ell = t_ell;
  g.phase_amplitude = g.V0 * t_ell / (2.0 * K::hbar);
  g.offset = offset;
  return g;
}

WaveField apply_laser_phase(WaveField field, const LaserGrating& g) {
  // Peak-to-peak phase V0 t / hbar = 2 Phi.
  simd::active().standing_wave_phase(field.amplitudes.data(), field.size(), field.origin, field.spacing,
                                     g.k_laser, g.offset, 2.0 * g.phase_amplitude);
  field.plane = Plane::after_laser;
  return field;
}

}  // namespace kdsim
