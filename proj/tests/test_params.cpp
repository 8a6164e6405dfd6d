#include <doctest.h>

#include "kdsim/errors.hpp"
#include "kdsim/params.hpp"
#include "oracle.hpp"

using namespace kdsim;

TEST_CASE("beam kinematics at 2.5 keV") {
  const BeamState b = derive_beam(2500.0);
  CHECK(b.velocity == doctest::Approx(oracle::velocity(2500.0)).epsilon(1e-12));
  CHECK(b.lambda_dB == doctest::Approx(oracle::lambda_dB(2500.0)).epsilon(1e-12));
  CHECK(b.lambda_dB == doctest::Approx(24.5e-12).epsilon(0.002));
  CHECK(b.velocity == doctest::Approx(2.965e7).epsilon(0.001));
  CHECK(b.momentum * b.velocity / 2.0 == doctest::Approx(b.energy).epsilon(1e-12));
  CHECK(joule_to_ev(ev_to_joule(123.4)) == doctest::Approx(123.4));
}

TEST_CASE("derived times") {
  const BeamState b = derive_beam(2500.0);
  CHECK(flight_time(40e-6, b) == doctest::Approx(1.35e-12).epsilon(0.01));
  CHECK(flight_time(0.0, b) == 0.0);
  CHECK(laser_crossing_time(125e-6, b) == doctest::Approx(4.22e-12).epsilon(0.01));
  // Slower beam after a 545 eV loss crosses more slowly.
  CHECK(laser_crossing_time(125e-6, derive_beam(2500.0 - 545.0)) == doctest::Approx(4.77e-12).epsilon(0.01));
}

TEST_CASE("nonpositive energy is a domain error") {
  CHECK_THROWS_AS(derive_beam(0.0), DomainError);
  CHECK_THROWS_AS(derive_beam(-5.0), DomainError);
}

TEST_CASE("defaults validate and describe the reference setup") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  CHECK_FALSE(cfg.has_plate());
  CHECK(cfg.dist_slit2_laser() == doctest::Approx(1e-3 + 40e-6 + 1e-2));
}

TEST_CASE("validation names the offending field") {
  auto message = [](auto mutate) {
    ExperimentConfig cfg;
    mutate(cfg);
    try {
      validate(cfg);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message([](ExperimentConfig& c) { c.beam_energy_ev = -1; }).find("beam.energy_ev") == 0);
  CHECK(message([](ExperimentConfig& c) { c.plate_height = 0.0; }).find("plate.height_m") == 0);
  CHECK(message([](ExperimentConfig& c) { c.grid.laser.samples = 1000; }).find("grid.laser_samples") == 0);
  CHECK(message([](ExperimentConfig& c) { c.analysis.density_max_points = 4096; })
            .find("analysis.density_max_points") == 0);
  CHECK(message([](ExperimentConfig& c) { c.slit1_width = 1e-3; }).find("grid.source_window_m") == 0);
}

TEST_CASE("source width conventions") {
  ExperimentConfig cfg;
  cfg.slit1_width = 2.0 * std::sqrt(2.0 * std::log(2.0)) * 3e-6;
  CHECK(cfg.source_sigma() == doctest::Approx(3e-6));
  CHECK(cfg.source_width(cfg.source_sigma()) == doctest::Approx(cfg.slit1_width));
  cfg.slit1_convention = WidthConvention::sigma;
  CHECK(cfg.source_sigma() == cfg.slit1_width);
}

TEST_CASE("power of two") {
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(1u << 20));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(96));
}
