#include "kdsim/wall.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kdsim/errors.hpp"

namespace kdsim::wall {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// pi e^2 k_B T rho, the wall-noise strength shared by tau_dec and R_dec.
double wall_strength(const WallInteraction& w) { return kPi * K::e * K::e * K::k_B * w.T * w.rho; }

}  // namespace

double decoherence_time(const WallInteraction& w, double delta_x) {
  if (!(delta_x > 0.0)) throw DomainError("decoherence_time: delta_x must be positive");
  if (std::isinf(w.z)) return kInf;
  return 4.0 * K::h * K::h * w.z * w.z * w.z / (wall_strength(w) * delta_x * delta_x);
}

double overlap_correction(double z, double delta_x) {
  if (!(z > 0.0) || !(delta_x > 0.0)) throw DomainError("overlap_correction: z and delta_x must be positive");
  const double r = z / delta_x;
  return r * r;
}

double decoherence_amount(const WallInteraction& w, double delta_x) {
  if (!(delta_x > 0.0)) throw DomainError("decoherence_amount: delta_x must be positive");
  if (std::isinf(w.z) || w.t_f == 0.0) return 0.0;
  // Constant integrand: t_f / (C tau) collapses to a single power law.
  const double dx2 = delta_x * delta_x;
  const double z5 = std::pow(w.z, 5);
  return w.t_f * wall_strength(w) * dx2 * dx2 / (4.0 * K::h * K::h * z5);
}

double power_loss(const WallInteraction& w, double velocity) {
  if (!(velocity > 0.0)) throw DomainError("power_loss: velocity must be positive");
  if (std::isinf(w.z)) return 0.0;
  return K::e * K::e * w.rho * velocity * velocity / (16.0 * kPi * w.z * w.z * w.z);
}

EnergyLoss energy_loss(double power, double t_f, double kinetic_energy) {
  if (power < 0.0 || t_f < 0.0 || kinetic_energy < 0.0)
    throw DomainError("energy_loss: arguments must be nonnegative");
  EnergyLoss out;
  out.joules = power * t_f;
  if (out.joules >= kinetic_energy) {
    std::ostringstream msg;
    msg << "energy loss " << joule_to_ev(out.joules) << " eV reaches the kinetic energy "
        << joule_to_ev(kinetic_energy) << " eV";
    throw InvalidRunError(msg.str());
  }
  out.strained = out.joules > 0.25 * kinetic_energy;
  return out;
}

double thermal_wavelength(double T) {
  if (!(T > 0.0)) throw DomainError("thermal_wavelength: T must be positive");
  return K::hbar / std::sqrt(2.0 * K::m_e * K::k_B * T);
}

double rdec_from_energy(double delta_x, double lambda_th, double delta_E, double velocity) {
  if (!(delta_x > 0.0) || !(lambda_th > 0.0) || !(velocity > 0.0))
    throw DomainError("rdec_from_energy: delta_x, lambda_th and velocity must be positive");
  const double r = delta_x / lambda_th;
  return r * r * delta_E / (K::m_e * velocity * velocity);
}

std::optional<double> coherence_length(const WallInteraction& w) {
  if (w.t_f <= 0.0 || std::isinf(w.z)) return std::nullopt;
  const double z5 = std::pow(w.z, 5);
  return std::pow(4.0 * std::numbers::ln2 * K::h * K::h * z5 / (wall_strength(w) * w.t_f), 0.25);
}

DecoherenceReport build_report(const ExperimentConfig& cfg, double delta_x_ref) {
  if (!(delta_x_ref > 0.0)) throw DomainError("build_report: delta_x_ref must be positive");
  DecoherenceReport r;
  const BeamState beam = derive_beam(cfg.beam_energy_ev);
  r.delta_x_ref = delta_x_ref;
  r.t_f = flight_time(cfg.plate_length, beam);
  r.lambda_th = thermal_wavelength(cfg.temperature);
  r.beam_after_loss = beam;

  if (!cfg.has_plate()) {
    r.tau_dec = kInf;
    r.C = kInf;
    return r;
  }

  const WallInteraction w{*cfg.plate_height, cfg.resistivity, cfg.temperature, r.t_f};
  r.tau_dec = decoherence_time(w, delta_x_ref);
  r.C = overlap_correction(w.z, delta_x_ref);
  r.R_dec = decoherence_amount(w, delta_x_ref);
  r.P = power_loss(w, beam.velocity);
  const EnergyLoss loss = energy_loss(r.P, r.t_f, beam.energy);
  r.delta_E = loss.joules;
  if (loss.strained) {
    std::ostringstream msg;
    msg << "energy loss " << r.delta_E_ev() << " eV exceeds 25% of the beam energy; "
        << "the small-loss approximation is strained";
    r.warnings.push_back(msg.str());
  }
  r.x_coh = coherence_length(w);
  r.R_dec_from_energy = rdec_from_energy(delta_x_ref, r.lambda_th, r.delta_E, beam.velocity);
  r.beam_after_loss = derive_beam(cfg.beam_energy_ev - r.delta_E_ev());
  return r;
}

}  // namespace kdsim::wall
