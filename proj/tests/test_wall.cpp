#include <doctest.h>

#include <cmath>
#include <limits>

#include "kdsim/errors.hpp"
#include "kdsim/wall.hpp"
#include "oracle.hpp"

using namespace kdsim;
using namespace kdsim::wall;

namespace {

ExperimentConfig with_plate(double h) {
  ExperimentConfig cfg;
  cfg.plate_height = h;
  return cfg;
}

double t_f() { return 40e-6 / oracle::velocity(2500.0); }

// Separation at which the decoherence amount equals R, by bisection on the
// independent closed form.
double solve_dx(double R, double z) {
  double lo = 1e-9, hi = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (oracle::rdec(z, 144.0, 300.0, t_f(), mid) < R ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

TEST_CASE("decoherence amount matches the closed form") {
  const WallInteraction w{2e-6, 144.0, 300.0, t_f()};
  for (double dx : {1e-8, 2.08e-7, 1e-6})
    CHECK(decoherence_amount(w, dx) == doctest::Approx(oracle::rdec(2e-6, 144.0, 300.0, t_f(), dx)).epsilon(1e-12));
  CHECK(overlap_correction(2e-6, 2.08e-7) == doctest::Approx(std::pow(2e-6 / 2.08e-7, 2)));
}

TEST_CASE("reference separation reproduces the tabulated decoherence amounts") {
  const double dx = solve_dx(2.185, 2e-6);
  CHECK(dx == doctest::Approx(2.08e-7).epsilon(0.01));
  const auto r2 = build_report(with_plate(2e-6));
  const auto r1 = build_report(with_plate(1e-6));
  CHECK(r2.R_dec == doctest::Approx(2.162).epsilon(0.002));
  CHECK(r1.R_dec == doctest::Approx(69.2).epsilon(0.002));
  CHECK(r2.R_dec == doctest::Approx(2.185).epsilon(0.10));
  CHECK(r1.R_dec == doctest::Approx(69.9).epsilon(0.10));
}

TEST_CASE("z^-5 scaling is independent of the separation") {
  for (double dx : {5e-8, 2.08e-7, 7e-7}) {
    const WallInteraction a{1e-6, 144.0, 300.0, t_f()}, b{2e-6, 144.0, 300.0, t_f()};
    CHECK(decoherence_amount(a, dx) / decoherence_amount(b, dx) == doctest::Approx(32.0).epsilon(1e-9));
  }
}

TEST_CASE("energy loss") {
  const double v = oracle::velocity(2500.0);
  const WallInteraction w{2e-6, 144.0, 300.0, t_f()};
  CHECK(power_loss(w, v) == doctest::Approx(oracle::power(2e-6, 144.0, v)).epsilon(1e-12));
  CHECK(power_loss(w, v) == doctest::Approx(8.08e-6).epsilon(0.002));

  const auto r2 = build_report(with_plate(2e-6));
  const auto r1 = build_report(with_plate(1e-6));
  CHECK(r2.delta_E_ev() == doctest::Approx(68.0).epsilon(0.01));
  CHECK(r1.delta_E_ev() == doctest::Approx(544.5).epsilon(0.01));
  CHECK(r1.delta_E_ev() / r2.delta_E_ev() == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(r1.beam_after_loss.energy == doctest::Approx(ev_to_joule(2500.0 - r1.delta_E_ev())));
  CHECK(r1.beam_after_loss.lambda_dB > r2.beam_after_loss.lambda_dB);
}

TEST_CASE("loss above a quarter of the energy warns, loss of all of it is invalid") {
  const auto r = build_report(with_plate(0.7e-6));  // about 1.6 keV
  CHECK(r.delta_E_ev() > 625.0);
  CHECK_FALSE(r.warnings.empty());
  CHECK(build_report(with_plate(1e-6)).warnings.empty());
  CHECK_THROWS_AS(build_report(with_plate(0.5e-6)), InvalidRunError);
  CHECK_THROWS_AS(energy_loss(1.0, 1.0, 0.5), InvalidRunError);
}

TEST_CASE("no plate means no wall interaction") {
  const auto r = build_report(ExperimentConfig{});
  CHECK(r.R_dec == 0.0);
  CHECK(r.delta_E == 0.0);
  CHECK(std::isinf(r.tau_dec));
  CHECK_FALSE(r.x_coh.has_value());
  CHECK(r.beam_after_loss.lambda_dB == doctest::Approx(oracle::lambda_dB(2500.0)));
  const WallInteraction far{std::numeric_limits<double>::infinity(), 144.0, 300.0, t_f()};
  CHECK(decoherence_amount(far, 1e-7) == 0.0);
  CHECK(power_loss(far, 3e7) == 0.0);
}

TEST_CASE("coherence length halves the coherence term") {
  const WallInteraction w{2e-6, 144.0, 300.0, t_f()};
  const auto x = coherence_length(w);
  REQUIRE(x.has_value());
  CHECK(decoherence_amount(w, *x) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK_FALSE(coherence_length(WallInteraction{2e-6, 144.0, 300.0, 0.0}).has_value());
}

TEST_CASE("thermal wavelength and the energy-linked form") {
  const double lth = thermal_wavelength(300.0);
  CHECK(lth == doctest::Approx(oracle::hbar / std::sqrt(2.0 * oracle::m * oracle::kB * 300.0)).epsilon(1e-12));
  const double v = 3e7, dE = 1e-17, dx = 2e-7;
  CHECK(rdec_from_energy(dx, lth, dE, v) == doctest::Approx(std::pow(dx / lth, 2) * dE / (oracle::m * v * v)));
}
