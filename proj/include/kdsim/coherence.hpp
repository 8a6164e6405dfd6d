#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdsim/params.hpp"
#include "kdsim/wave_field.hpp"

namespace kdsim {

/// rho(x_i, x_j) on a uniform grid, row-major, trace-normalized (sum of the
/// diagonal equals 1).
struct DensityMatrixSlice {
  std::size_t n = 0;
  double spacing = 0.0;
  double origin = 0.0;
  Plane plane = Plane::before_laser;
  std::size_t decimation = 1;  // field samples per matrix sample
  std::vector<cplx> values;

  cplx operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double x(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double trace() const;
  /// Intensity-weighted mean position of the diagonal.
  double centroid() const;
  /// Largest |rho_ij - conj(rho_ji)| relative to the largest |rho_ij|.
  double hermiticity_error() const;
};

/// Sub-window and resolution of the density matrix relative to the fields.
struct DensityWindow {
  std::optional<double> half_width;  // crop about x = 0; nullopt keeps the full grid
  std::size_t max_points = 2048;     // decimate (keep every d-th sample) above this
};

/// Symmetric run of every d-th sample about the node nearest x = 0, limited
/// by the window. Decimation keeps samples exactly (no averaging).
WaveField crop_field(const WaveField& f, const DensityWindow& window);

/// Weighted sum of outer products u u^H over the fields, cropped and
/// decimated per the window, then trace-normalized. Throws DomainError on
/// empty input, size mismatch or fields on different grids.
DensityMatrixSlice density_matrix(std::span<const WaveField> fields, std::span<const double> weights,
                                  const DensityWindow& window = {});

/// |rho(x_c + s/2, x_c - s/2)| for s = 0, dx, 2 dx, ... about the grid node
/// nearest the centroid. Odd multiples use the half-node centre x_c + dx/2.
struct AntidiagonalProfile {
  double center = 0.0;
  std::vector<double> separation;
  std::vector<double> magnitude;

  /// Linear interpolation; throws DomainError beyond the last separation.
  double at(double s) const;
};

AntidiagonalProfile antidiagonal_profile(const DensityMatrixSlice& rho);
/// Same, about a given grid index.
AntidiagonalProfile antidiagonal_profile(const DensityMatrixSlice& rho, std::size_t center_index);

struct FwhmResult {
  double fwhm = 0.0;
  bool window_limited = false;  // profile never fell to half: fwhm is twice the largest separation
  std::string warning;
};

FwhmResult antidiagonal_fwhm(const AntidiagonalProfile& profile);
FwhmResult antidiagonal_fwhm(const DensityMatrixSlice& rho);

/// Ratio of normalized coherence terms |rho(s)| / rho(0) of rho_dec and
/// rho_in at separation s about rho_in's centre node. Throws AnalysisError when
/// rho_in's term is below the numerical floor, DomainError on grid mismatch.
double coherence_ratio(const DensityMatrixSlice& rho_dec, const DensityMatrixSlice& rho_in, double separation);

/// Density matrix at the before-laser plane for a Gaussian source of standard
/// deviation sigma_e, using cfg's grids and beam before any wall loss.
DensityMatrixSlice source_density_matrix(const ExperimentConfig& cfg, double sigma_e);

struct CalibrationResult {
  double w1 = 0.0;
  double separation = 0.0;   // where the ratio was evaluated
  double target_R = 0.0;
  double achieved_R = 0.0;   // -ln(ratio) at w1
  int evaluations = 0;
};

/// Finds w1 >= cfg.slit1_width with coherence_ratio = exp(-target_R) at the
/// separation (default: cfg.analysis.calibration_separation, else the baseline
/// anti-diagonal half width at half maximum). Bisection in log w1 to 1%.
/// Throws AnalysisError with the achievable range when out of reach.
CalibrationResult calibrate_source_width(const ExperimentConfig& cfg, double target_R,
                                         std::optional<double> separation = std::nullopt);

/// Largest w1 (in cfg's width convention) whose quadrature nodes stay inside the source window.
double max_calibration_width(const ExperimentConfig& cfg);

/// separation_m,magnitude rows.
void write_antidiagonal_csv(std::ostream& os, const AntidiagonalProfile& profile);

}  // namespace kdsim
