#pragma once

#include <complex>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "kdsim/params.hpp"

namespace kdsim {

using cplx = std::complex<double>;

enum class Plane { source, slit2, before_laser, after_laser, screen };
std::string_view to_string(Plane p);

/// Complex transverse amplitude on a uniform grid at one longitudinal plane.
struct WaveField {
  std::vector<cplx> amplitudes;
  double spacing = 0.0;
  double origin = 0.0;  // coordinate of amplitudes[0]
  Plane plane = Plane::source;
  double lambda_dB = 0.0;

  WaveField() = default;
  WaveField(const PlaneGrid& grid, Plane p, double lambda)
      : amplitudes(grid.samples), spacing(grid.spacing()), origin(grid.origin()), plane(p), lambda_dB(lambda) {}

  std::size_t size() const { return amplitudes.size(); }
  double x(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  PlaneGrid grid() const { return PlaneGrid{spacing * static_cast<double>(size()), size()}; }

  /// sqrt(sum |u|^2 dx)
  double l2_norm() const;
  /// Scales to unit L2 norm; a zero field is left untouched.
  void normalize();
};

/// Writes x,re,im rows.
void write_field_csv(std::ostream& os, const WaveField& f);

}  // namespace kdsim
