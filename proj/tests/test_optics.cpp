#include <doctest.h>

#include <cmath>

#include "kdsim/errors.hpp"
#include "kdsim/optics.hpp"
#include "oracle.hpp"

using namespace kdsim;

TEST_CASE("ponderomotive depth") {
  CHECK(ponderomotive_depth(1e14, 532e-9) == doctest::Approx(oracle::ponderomotive(1e14, 532e-9)).epsilon(1e-12));
  CHECK(ponderomotive_depth(1e14, 532e-9) == doctest::Approx(4.23e-23).epsilon(0.005));
  CHECK(ponderomotive_depth(18e14, 532e-9) / ponderomotive_depth(1e14, 532e-9) == doctest::Approx(18.0));
  CHECK(ponderomotive_depth(0.0, 532e-9) == 0.0);
}

TEST_CASE("grating phase amplitude at the reference intensity") {
  const double t = 125e-6 / oracle::velocity(2500.0);
  const LaserGrating g = make_grating(1e14, 532e-9, t);
  CHECK(g.k_laser == doctest::Approx(2.0 * oracle::pi / 532e-9));
  CHECK(g.phase_amplitude == doctest::Approx(g.V0 * t / (2.0 * oracle::hbar)));
  CHECK(g.phase_amplitude == doctest::Approx(0.846).epsilon(0.005));
}

TEST_CASE("laser phase is a pure phase with the cos^2 profile") {
  const PlaneGrid grid{64e-6, 4096};
  WaveField f(grid, Plane::before_laser, 2.45e-11);
  for (std::size_t i = 0; i < f.size(); ++i) f.amplitudes[i] = std::exp(-f.x(i) * f.x(i) / 2e-10) * cplx(1, 0.3);
  const double before = f.l2_norm();
  const LaserGrating g = make_grating(18e14, 532e-9, 4.2e-12, 40e-9);
  const WaveField out = apply_laser_phase(f, g);
  CHECK(out.l2_norm() == doctest::Approx(before).epsilon(1e-13));
  for (std::size_t i : {0u, 1000u, 2048u, 3001u}) {
    const double c = std::cos(g.k_laser * (f.x(i) - g.offset));
    const cplx expect = f.amplitudes[i] * std::exp(cplx(0, -2.0 * g.phase_amplitude * c * c));
    CHECK(std::abs(out.amplitudes[i] - expect) < 1e-12);
  }
}

TEST_CASE("thin grating diffracts a plane wave into J_n^2 orders") {
  // Integer number of standing-wave periods so the orders are orthogonal on the grid.
  const double period = 266e-9;
  const std::size_t per = 64, periods = 128;
  const PlaneGrid grid{period * periods, per * periods};
  WaveField f(grid, Plane::before_laser, 2.45e-11);
  for (auto& a : f.amplitudes) a = 1.0;
  const LaserGrating g = make_grating(3e14, 532e-9, 4.2e-12);
  const WaveField out = apply_laser_phase(f, g);
  double total = 0.0;
  for (int n = -6; n <= 6; ++n) {
    cplx c{};
    for (std::size_t i = 0; i < out.size(); ++i)
      c += out.amplitudes[i] * std::exp(cplx(0, -2.0 * oracle::pi * n * out.x(i) / period));
    const double pn = std::norm(c / static_cast<double>(out.size()));
    total += pn;
    CHECK(pn == doctest::Approx(std::pow(std::cyl_bessel_j(std::abs(n), g.phase_amplitude), 2)).epsilon(1e-9));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("point source and Gaussian slit") {
  const PlaneGrid grid{1e-5, 1000};
  const WaveField p = point_source(1.234e-6, grid, 2.45e-11);
  std::size_t nz = 0, at = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.amplitudes[i] != cplx{}) ++nz, at = i;
  CHECK(nz == 1);
  CHECK(std::abs(p.x(at) - 1.234e-6) <= 0.5 * grid.spacing());
  CHECK_THROWS_AS(point_source(6e-6, grid, 2.45e-11), DomainError);

  WaveField flat(grid, Plane::slit2, 2.45e-11);
  for (auto& a : flat.amplitudes) a = 1.0;
  const WaveField s = apply_gaussian_slit(flat, 1e-6);
  for (std::size_t i : {0u, 400u, 500u, 611u})
    CHECK(s.amplitudes[i].real() == doctest::Approx(std::exp(-0.5 * std::pow(s.x(i) / 1e-6, 2))));
}
