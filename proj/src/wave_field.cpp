#include "kdsim/wave_field.hpp"

#include <cmath>
#include <ostream>

#include "kdsim/simd/kernels.hpp"

namespace kdsim {

std::string_view to_string(Plane p) {
  switch (p) {
    case Plane::source:
      return "source";
    case Plane::slit2:
      return "slit2";
    case Plane::before_laser:
      return "before_laser";
    case Plane::after_laser:
      return "after_laser";
    case Plane::screen:
      return "screen";
  }
  return "unknown";
}

double WaveField::l2_norm() const {
  return std::sqrt(simd::active().norm2(amplitudes.data(), amplitudes.size()) * spacing);
}

void WaveField::normalize() {
  const double n = l2_norm();
  if (n == 0.0 || !std::isfinite(n)) return;
  const double s = 1.0 / n;
  for (auto& a : amplitudes) a *= s;
}

void write_field_csv(std::ostream& os, const WaveField& f) {
  os.precision(17);
  os << "x_m,re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    os << f.x(i) << ',' << f.amplitudes[i].real() << ',' << f.amplitudes[i].imag() << '\n';
}

}  // namespace kdsim
