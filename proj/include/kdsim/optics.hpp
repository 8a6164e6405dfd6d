#pragma once

#include "kdsim/wave_field.hpp"

namespace kdsim {

/// Discrete delta at the grid node nearest chi. Throws DomainError outside the window.
WaveField point_source(double chi, const PlaneGrid& grid, double lambda_dB);

/// Multiplies by exp(-x^2 / (2 width^2)) about the beam axis.
WaveField apply_gaussian_slit(WaveField field, double width);

/// Time-averaged ponderomotive depth V0 = e^2 I / (2 m eps0 c omega^2) of a
/// standing wave with optical wavelength lambda_laser.
double ponderomotive_depth(double intensity, double lambda_laser);

/// Thin standing-wave phase grating V0 cos^2(k (x - offset)) crossed in time t_ell.
struct LaserGrating {
  double V0 = 0.0;
  double k_laser = 0.0;
  double t_ell = 0.0;
  double phase_amplitude = 0.0;  // V0 t_ell / (2 hbar); order n carries J_n^2 of this
  double offset = 0.0;
};

LaserGrating make_grating(double intensity, double lambda_laser, double t_ell, double offset = 0.0);

/// Imprints exp(-i V0 cos^2(k (x - offset)) t_ell / hbar). Pure phase.
WaveField apply_laser_phase(WaveField field, const LaserGrating& g);

}  // namespace kdsim
