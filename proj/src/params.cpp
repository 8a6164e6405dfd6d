#include "kdsim/params.hpp"

#include <cmath>
#include <string>

#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError(field + ": " + why);
}

void require_nonneg(double v, const std::string& field) {
  require(std::isfinite(v) && v >= 0.0, field, "must be finite and >= 0");
}

void require_pos(double v, const std::string& field) {
  require(std::isfinite(v) && v > 0.0, field, "must be finite and > 0");
}

void check_plane(const PlaneGrid& g, const std::string& name) {
  require_pos(g.window, "grid." + name + "_window_m");
  require(is_power_of_two(g.samples) && g.samples >= 2, "grid." + name + "_samples",
          "must be a power of two >= 2");
}

}  // namespace

namespace {
const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::log(2.0));
}

double ExperimentConfig::source_sigma(double w1) const {
  return slit1_convention == WidthConvention::fwhm ? w1 / kFwhmPerSigma : w1;
}

double ExperimentConfig::source_width(double sigma_e) const {
  return slit1_convention == WidthConvention::fwhm ? sigma_e * kFwhmPerSigma : sigma_e;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate(const ExperimentConfig& cfg) {
  require_pos(cfg.beam_energy_ev, "beam.energy_ev");
  require_nonneg(cfg.slit1_width, "source.slit1_width_m");
  require_pos(cfg.slit2_width, "slit2.width_m");
  require_pos(cfg.dist_source_slit2, "source.dist_to_slit2_m");
  require_nonneg(cfg.dist_slit2_plate, "slit2.dist_to_plate_m");
  require_nonneg(cfg.plate_length, "plate.length_m");
  if (cfg.plate_height) require_pos(*cfg.plate_height, "plate.height_m");
  require_pos(cfg.resistivity, "plate.resistivity_ohm_m");
  require_pos(cfg.temperature, "plate.temperature_k");
  require_pos(cfg.laser_wavelength, "laser.wavelength_m");
  require_pos(cfg.laser_waist, "laser.waist_m");
  require_nonneg(cfg.laser_intensity, "laser.intensity_w_m2");
  require(std::isfinite(cfg.laser_offset), "laser.offset_m", "must be finite");
  require_nonneg(cfg.dist_plate_laser, "plate.dist_to_laser_m");
  require_pos(cfg.dist_slit2_laser(), "slit2.dist_to_plate_m");
  require_pos(cfg.dist_laser_screen, "laser.dist_to_screen_m");
  require_nonneg(cfg.detection_sigma, "detector.sigma_m");

  const auto& g = cfg.grid;
  check_plane(g.source, "source");
  check_plane(g.slit, "slit");
  check_plane(g.laser, "laser");
  check_plane(g.screen, "screen");
  require(g.source_points >= 1, "grid.source_points", "must be >= 1");
  require_pos(g.source_node_spacing, "grid.source_node_spacing_m");
  require_pos(g.source_span_sigmas, "grid.source_span_sigmas");
  require(cfg.source_sigma() * g.source_span_sigmas < 0.5 * g.source.window, "grid.source_window_m",
          "must exceed 2 * source_span_sigmas * sigma_e");

  const auto& a = cfg.analysis;
  require_pos(a.reference_separation, "analysis.reference_separation_m");
  require(a.contrast_max_order >= 1, "analysis.contrast_max_order", "must be >= 1");
  require(a.peak_prominence >= 0.0 && a.peak_prominence < 1.0, "analysis.peak_prominence",
          "must lie in [0, 1)");
  require(a.shift_order >= 1, "analysis.shift_order", "must be >= 1");
  if (a.calibration_separation) require_pos(*a.calibration_separation, "analysis.calibration_separation_m");
  require_pos(a.density_half_width, "analysis.density_half_width_m");
  require(a.density_max_points >= 8 && a.density_max_points <= 2048, "analysis.density_max_points",
          "must lie in [8, 2048]");
}

double ev_to_joule(double ev) { return ev * K::e; }
double joule_to_ev(double joule) { return joule / K::e; }

BeamState derive_beam(double energy_ev) {
  if (!(energy_ev > 0.0) || !std::isfinite(energy_ev))
    throw DomainError("derive_beam: energy must be positive, got " + std::to_string(energy_ev) + " eV");
  BeamState b;
  b.energy = ev_to_joule(energy_ev);
  b.velocity = std::sqrt(2.0 * b.energy / K::m_e);
  b.momentum = K::m_e * b.velocity;
  b.lambda_dB = K::h / b.momentum;
  return b;
}

double flight_time(double plate_length, const BeamState& beam) {
  if (plate_length < 0.0) throw DomainError("flight_time: negative plate length");
  return plate_length / beam.velocity;
}

double laser_crossing_time(double waist, const BeamState& beam_after_loss) {
  if (!(waist > 0.0)) throw DomainError("laser_crossing_time: waist must be positive");
  return waist / beam_after_loss.velocity;
}

}  // namespace kdsim
