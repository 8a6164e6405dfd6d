#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

namespace kdsim {

/// CODATA 2018 exact / recommended values, SI units.
struct PhysicalConstants {
  static constexpr double h = 6.62607015e-34;
  static constexpr double hbar = h / (2.0 * std::numbers::pi);
  static constexpr double e = 1.602176634e-19;
  static constexpr double m_e = 9.1093837015e-31;
  static constexpr double k_B = 1.380649e-23;
  static constexpr double eps0 = 8.8541878128e-12;
  static constexpr double c = 299792458.0;
};
using K = PhysicalConstants;

enum class PropagationMethod { exact, fresnel };
enum class SourceRule { uniform, gauss_hermite };

/// How slit1_width maps to the standard deviation of the Gaussian source.
enum class WidthConvention { fwhm, sigma };

/// Transverse sampling of one longitudinal plane, centred on the beam axis.
struct PlaneGrid {
  double window = 0.0;      // full transverse extent (m)
  std::size_t samples = 0;  // power of two

  double spacing() const { return window / static_cast<double>(samples); }
  double origin() const { return -0.5 * window; }
};

struct NumericalGrid {
  PlaneGrid source{1.2e-3, std::size_t{1} << 18};
  PlaneGrid slit{16e-6, std::size_t{1} << 13};
  PlaneGrid laser{64e-6, std::size_t{1} << 15};
  PlaneGrid screen{2.4e-3, std::size_t{1} << 14};

  // Source-point quadrature. Nodes cover +-source_span_sigmas * sigma_e with
  // spacing no larger than source_node_spacing and at least source_points nodes.
  std::size_t source_points = 9;
  double source_node_spacing = 1e-6;
  double source_span_sigmas = 5.0;
  SourceRule source_rule = SourceRule::uniform;

  PropagationMethod method = PropagationMethod::fresnel;
};

/// Knobs for the observables extracted from a run.
struct AnalysisSettings {
  double reference_separation = 2.08e-7;  // calibration Delta x for the wall model (m)
  int contrast_max_order = 2;
  double peak_prominence = 0.02;          // fraction of global maximum
  int shift_order = 13;
  std::optional<double> calibration_separation;  // default: baseline anti-diagonal HWHM
  double density_half_width = 4e-6;       // crop of the before-laser plane (m)
  std::size_t density_max_points = 512;
};

/// Every physical and numerical parameter of one simulated run. SI units
/// except beam_energy_ev.
struct ExperimentConfig {
  double beam_energy_ev = 2500.0;
  double slit1_width = 6.7e-6;       // incoherent source width w1
  WidthConvention slit1_convention = WidthConvention::fwhm;
  double slit2_width = 1e-6;         // Gaussian amplitude transmission width
  double dist_source_slit2 = 0.24;
  double dist_slit2_plate = 1e-3;
  double plate_length = 40e-6;
  std::optional<double> plate_height;  // nullopt: no plate
  double resistivity = 144.0;
  double temperature = 300.0;
  double laser_wavelength = 532e-9;
  double laser_waist = 125e-6;
  double laser_intensity = 1e14;
  double laser_offset = 0.0;         // transverse position of a cos^2 antinode
  double dist_plate_laser = 1e-2;
  double dist_laser_screen = 0.24;
  double detection_sigma = 5e-6;
  NumericalGrid grid;
  AnalysisSettings analysis;

  /// Slit 2 to the laser plane, plate region included.
  double dist_slit2_laser() const { return dist_slit2_plate + plate_length + dist_plate_laser; }
  bool has_plate() const { return plate_height.has_value(); }
  /// Standard deviation sigma_e of the source for a width w1 in this convention.
  double source_sigma(double w1) const;
  double source_sigma() const { return source_sigma(slit1_width); }
  /// Inverse of source_sigma.
  double source_width(double sigma_e) const;
};

/// Throws ConfigError naming the first offending field.
void validate(const ExperimentConfig& cfg);

struct BeamState {
  double energy = 0.0;     // J
  double velocity = 0.0;   // m/s
  double momentum = 0.0;   // kg m/s
  double lambda_dB = 0.0;  // m
};

double ev_to_joule(double ev);
double joule_to_ev(double joule);

/// Non-relativistic electron kinematics. Throws DomainError for energy <= 0.
BeamState derive_beam(double energy_ev);

/// Time to traverse the plate; zero length gives zero time.
double flight_time(double plate_length, const BeamState& beam);

/// Time to cross a laser region of width `waist` at the (possibly slowed) beam velocity.
double laser_crossing_time(double waist, const BeamState& beam_after_loss);

bool is_power_of_two(std::size_t n);

}  // namespace kdsim
