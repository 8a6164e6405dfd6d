#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kdsim/params.hpp"

namespace kdsim::wall {

/// Electron flying at constant height z over a resistive wall for time t_f.
/// z may be +infinity (no wall), in which case every rate vanishes.
struct WallInteraction {
  double z = 0.0;    // m
  double rho = 0.0;  // Ohm m
  double T = 0.0;    // K
  double t_f = 0.0;  // s
};

/// Decoherence time for two paths separated by delta_x:
/// 4 h^2 z^3 / (pi e^2 k_B T rho delta_x^2).
double decoherence_time(const WallInteraction& w, double delta_x);

/// Which-way overlap correction (z / delta_x)^2.
double overlap_correction(double z, double delta_x);

/// t_f / (C tau_dec) for constant height; scales as delta_x^4 / z^5.
double decoherence_amount(const WallInteraction& w, double delta_x);

/// Image-charge drag power e^2 rho v^2 / (16 pi z^3).
double power_loss(const WallInteraction& w, double velocity);

struct EnergyLoss {
  double joules = 0.0;
  bool strained = false;  // loss exceeds a quarter of the kinetic energy
};

/// P t_f. Throws InvalidRunError when the loss reaches the kinetic energy.
EnergyLoss energy_loss(double power, double t_f, double kinetic_energy);

/// hbar / sqrt(2 m_e k_B T). Swap this one function to change the convention.
double thermal_wavelength(double T);

/// (delta_x / lambda_th)^2 * delta_E / (m v^2).
double rdec_from_energy(double delta_x, double lambda_th, double delta_E, double velocity);

/// Separation at which exp(-t_f / (C tau)) = 1/2. nullopt when t_f = 0 or z is infinite.
std::optional<double> coherence_length(const WallInteraction& w);

struct DecoherenceReport {
  double delta_x_ref = 0.0;
  double t_f = 0.0;
  double tau_dec = 0.0;   // +inf without a plate
  double C = 0.0;         // +inf without a plate
  double R_dec = 0.0;
  double P = 0.0;
  double delta_E = 0.0;
  std::optional<double> x_coh;
  double lambda_th = 0.0;
  double R_dec_from_energy = 0.0;  // the energy-linked form, for comparison
  BeamState beam_after_loss;
  std::vector<std::string> warnings;

  double delta_E_ev() const { return joule_to_ev(delta_E); }
};

DecoherenceReport build_report(const ExperimentConfig& cfg, double delta_x_ref);
inline DecoherenceReport build_report(const ExperimentConfig& cfg) {
  return build_report(cfg, cfg.analysis.reference_separation);
}

}  // namespace kdsim::wall
