#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "kdsim/quadrature.hpp"
#include "kdsim/wave_field.hpp"

namespace kdsim {

class Chain;

struct PatternMeta {
  double intensity = 0.0;                 // W/m^2
  std::optional<double> plate_height;     // nullopt: no plate
  double w1 = 0.0;                        // source width as configured (m)
  double delta_e_ev = 0.0;
  double order_spacing = 0.0;             // nominal, at the screen (m)
};

/// Probability density on the screen grid, unit area.
struct DiffractionPattern {
  double spacing = 0.0;
  double origin = 0.0;
  std::vector<double> density;
  PatternMeta meta;

  std::size_t size() const { return density.size(); }
  double x(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double area() const;
  double centroid() const;
  double max() const;
};

/// Weighted sum of |u|^2 over screen fields, renormalized to unit area.
DiffractionPattern incoherent_sum(std::span<const WaveField> screen_fields, std::span<const double> weights);

/// Same, running the chain per source node. Nodes are evaluated in parallel
/// batches and summed in node order, so the result is thread-count independent.
DiffractionPattern incoherent_sum(const Chain& chain, std::span<const SourceNode> nodes);

/// Convolution with the normalized Gaussian exp(-x^2 / (2 sigma_d^2)); area
/// is restored to 1 afterwards. sigma_d = 0 is the identity.
DiffractionPattern detection_convolve(const DiffractionPattern& p, double sigma_d);

struct PeakSet {
  std::vector<int> orders;
  std::vector<double> positions;
  std::vector<double> heights;

  std::size_t size() const { return positions.size(); }
  std::optional<std::size_t> find(int order) const;
  /// Largest n such that orders -n..n are all present.
  int resolved_orders() const;
};

/// Local maxima whose topographic prominence is at least min_prominence of
/// the global maximum, refined by a parabola through three samples. The peak
/// nearest the centroid is order 0; others are counted outward from it.
PeakSet find_peaks(const DiffractionPattern& p, double min_prominence);

/// (max - min) / (max + min) of the density over [lo, hi].
double contrast(const DiffractionPattern& p, double lo, double hi);

/// Contrast over |x - centroid| <= max_order * meta.order_spacing.
double contrast(const DiffractionPattern& p, int max_order);

/// Mean over +-n of (|x_n| - |x_n,ref|) / |x_n,ref|, positions taken relative
/// to each set's order 0. Throws AnalysisError naming the set missing an order.
double peak_shift(const PeakSet& reference, const PeakSet& shifted, int order);

/// Thin phase-grating order populations J_n^2(phi), n = -max_order..max_order.
struct OrderPopulations {
  int max_order = 0;
  std::vector<double> values;

  double at(int n) const { return values[static_cast<std::size_t>(n + max_order)]; }
  double sum() const;
};

OrderPopulations raman_nath_oracle(double phase_amplitude, int max_order);

/// Pattern mass in bins [centre + (n - 1/2) s, centre + (n + 1/2) s).
OrderPopulations order_populations(const DiffractionPattern& p, double centre, double spacing, int max_order);

/// max |density(x) - density(-x)| / max density, on a grid centred on x = 0.
double mirror_asymmetry(const DiffractionPattern& p);

/// position_m,density_per_m rows.
void write_pattern_csv(std::ostream& os, const DiffractionPattern& p);

}  // namespace kdsim
