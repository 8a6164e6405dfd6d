#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "kdsim/coherence.hpp"
#include "kdsim/errors.hpp"

using namespace kdsim;

namespace {

const PlaneGrid kGrid{16e-6, 1024};

// Gaussian envelope of rms intensity width sigma, tilted by kappa.
WaveField tilted(double sigma, double kappa) {
  WaveField f(kGrid, Plane::before_laser, 2.45e-11);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.x(i);
    f.amplitudes[i] = std::exp(cplx(-x * x / (4.0 * sigma * sigma), kappa * x));
  }
  return f;
}

// Gaussian-Schell ensemble: tilts with rms 1/xi give a coherence term exp(-s^2 / (2 xi^2)).
struct Ensemble {
  std::vector<WaveField> fields;
  std::vector<double> weights;
};

Ensemble schell(double sigma, double xi, int nodes = 161) {
  Ensemble e;
  const double sk = 1.0 / xi, span = 8.0 * sk;
  for (int j = 0; j < nodes; ++j) {
    const double k = -span + 2.0 * span * j / (nodes - 1);
    e.fields.push_back(tilted(sigma, k));
    e.weights.push_back(std::exp(-0.5 * k * k / (sk * sk)));
  }
  return e;
}

double gsm_antidiagonal(double s, double sigma, double xi) {
  return std::exp(-s * s / (8.0 * sigma * sigma) - s * s / (2.0 * xi * xi));
}

Eigen::MatrixXcd as_eigen(const DensityMatrixSlice& r) {
  Eigen::MatrixXcd m(r.n, r.n);
  for (std::size_t i = 0; i < r.n; ++i)
    for (std::size_t j = 0; j < r.n; ++j) m(i, j) = r(i, j);
  return m;
}

}  // namespace

TEST_CASE("a single field gives a pure state") {
  const WaveField f = tilted(1e-6, 3e6);
  const double w = 1.0;
  const auto rho = density_matrix(std::span(&f, 1), std::span(&w, 1), DensityWindow{std::nullopt, 128});
  CHECK(rho.trace() == doctest::Approx(1.0));
  const Eigen::MatrixXcd m = as_eigen(rho);
  CHECK((m * m - m).norm() < 1e-12);
  CHECK(rho.hermiticity_error() < 1e-15);
}

TEST_CASE("two-point states") {
  WaveField a(kGrid, Plane::before_laser, 2.45e-11), b = a, c = a;
  a.amplitudes[400] = 1.0;
  b.amplitudes[600] = 1.0;
  c.amplitudes[400] = std::sqrt(0.3);
  c.amplitudes[600] = cplx(0, std::sqrt(0.7));
  const DensityWindow full{std::nullopt, 2048};

  const std::vector<WaveField> mixed{a, b};
  const std::vector<double> w{0.3, 0.7};
  const auto rm = density_matrix(mixed, w, full);
  const auto at = [&](std::size_t i) { return static_cast<std::size_t>(std::lround((a.x(i) - rm.origin) / rm.spacing)); };
  const std::size_t i = at(400), j = at(600);
  CHECK(rm(i, i).real() == doctest::Approx(0.3));
  CHECK(rm(j, j).real() == doctest::Approx(0.7));
  CHECK(std::abs(rm(i, j)) == 0.0);

  const double one = 1.0;
  const auto rp = density_matrix(std::span(&c, 1), std::span(&one, 1), full);
  CHECK(std::abs(rp(i, j)) == doctest::Approx(std::sqrt(0.21)));
  CHECK(std::arg(rp(j, i)) == doctest::Approx(M_PI / 2));
}

TEST_CASE("pure Gaussian anti-diagonal width") {
  const double sigma = 1.2e-6;
  const WaveField f = tilted(sigma, 0.0);
  const double w = 1.0;
  const auto rho = density_matrix(std::span(&f, 1), std::span(&w, 1), DensityWindow{std::nullopt, 1024});
  const FwhmResult r = antidiagonal_fwhm(rho);
  CHECK_FALSE(r.window_limited);
  CHECK(r.fwhm == doctest::Approx(4.0 * sigma * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-3));
}

TEST_CASE("Gaussian-Schell ensembles across two decades of coherence length") {
  const double sigma = 1e-6;
  const DensityWindow win{std::nullopt, 1024};
  const double one = 1.0;
  const WaveField pure = tilted(sigma, 0.0);
  const auto rho_pure = density_matrix(std::span(&pure, 1), std::span(&one, 1), win);
  for (double xi : {0.1e-6, 1e-6, 10e-6}) {
    CAPTURE(xi);
    const Ensemble e = schell(sigma, xi);
    const auto rho = density_matrix(e.fields, e.weights, win);
    const auto prof = antidiagonal_profile(rho);
    CHECK(std::abs(prof.center) < 0.5 * rho.spacing);
    for (std::size_t m = 0; m < prof.separation.size(); ++m) {
      const double expect = gsm_antidiagonal(prof.separation[m], sigma, xi);
      if (expect < 0.05) break;
      CHECK(prof.magnitude[m] / prof.magnitude[0] == doctest::Approx(expect).epsilon(0.02));
    }
    const double sh = std::sqrt(std::log(2.0) / (1.0 / (8.0 * sigma * sigma) + 1.0 / (2.0 * xi * xi)));
    CHECK(antidiagonal_fwhm(rho).fwhm == doctest::Approx(2.0 * sh).epsilon(0.02));

    // Against the pure state the ratio is the bare coherence term.
    for (double s : {0.5 * xi, xi}) {
      if (s > 3e-6) continue;
      CHECK(coherence_ratio(rho, rho_pure, s) == doctest::Approx(std::exp(-s * s / (2 * xi * xi))).epsilon(0.02));
    }
    CHECK(coherence_ratio(rho, rho, 0.7e-6) == doctest::Approx(1.0));
  }
}

TEST_CASE("ensemble density matrices are Hermitian and positive semidefinite") {
  const Ensemble e = schell(1e-6, 0.4e-6, 41);
  const auto rho = density_matrix(e.fields, e.weights, DensityWindow{4e-6, 256});
  CHECK(rho.n <= 256);
  CHECK(rho.trace() == doctest::Approx(1.0));
  CHECK(rho.hermiticity_error() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(as_eigen(rho));
  CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().maxCoeff());
  CHECK(es.eigenvalues().sum() == doctest::Approx(1.0));
}

TEST_CASE("cropping and decimation keep exact samples") {
  const Ensemble e = schell(1e-6, 0.8e-6, 41);
  const auto full = density_matrix(e.fields, e.weights, DensityWindow{std::nullopt, 2048});
  const auto dec = density_matrix(e.fields, e.weights, DensityWindow{3e-6, 61});
  CHECK(dec.n <= 61);
  CHECK(dec.decimation > 1);
  CHECK(dec.spacing == doctest::Approx(full.spacing * static_cast<double>(dec.decimation)));
  const auto idx = [&](double x) { return static_cast<std::size_t>(std::lround((x - full.origin) / full.spacing)); };
  const std::size_t c_dec = dec.n / 2;
  CHECK(std::abs(dec.x(c_dec)) < 1e-15);
  const double scale_full = full(idx(0.0), idx(0.0)).real(), scale_dec = dec(c_dec, c_dec).real();
  for (std::size_t i = 0; i < dec.n; i += 7)
    for (std::size_t j = 0; j < dec.n; j += 5)
      CHECK(std::abs(dec(i, j) / scale_dec - full(idx(dec.x(i)), idx(dec.x(j))) / scale_full) < 1e-12);

  const WaveField cropped = crop_field(e.fields[3], DensityWindow{3e-6, 61});
  CHECK(cropped.size() % 2 == 1);
  CHECK(cropped.x(cropped.size() - 1) <= 3e-6 + 1e-15);
}

TEST_CASE("input checks") {
  const WaveField a = tilted(1e-6, 0.0);
  WaveField b(PlaneGrid{8e-6, 1024}, Plane::before_laser, 2.45e-11);
  const std::vector<WaveField> mixed{a, b};
  const std::vector<double> w{1.0, 1.0};
  CHECK_THROWS_AS(density_matrix(mixed, w), DomainError);
  CHECK_THROWS_AS(density_matrix(std::span<const WaveField>{}, std::span<const double>{}), DomainError);
  CHECK_THROWS_AS(density_matrix(std::span(&a, 1), std::span(w.data(), 2)), DomainError);

  // A reference that has lost coherence below the floor cannot normalize a ratio.
  const Ensemble e = schell(1e-6, 0.05e-6, 81);
  const auto rho = density_matrix(e.fields, e.weights, DensityWindow{std::nullopt, 1024});
  CHECK_THROWS_AS(coherence_ratio(rho, rho, 2e-6), AnalysisError);
}

TEST_CASE("window-limited width is flagged") {
  const WaveField f = tilted(30e-6, 0.0);
  const double w = 1.0;
  const auto rho = density_matrix(std::span(&f, 1), std::span(&w, 1), DensityWindow{2e-6, 128});
  const FwhmResult r = antidiagonal_fwhm(rho);
  CHECK(r.window_limited);
  CHECK_FALSE(r.warning.empty());
}

TEST_CASE("source coherence at the laser plane falls with source width") {
  ExperimentConfig cfg;
  double prev = INFINITY;
  for (double sigma : {0.5e-6, 2e-6, 5e-6, 12e-6}) {
    CAPTURE(sigma);
    const auto rho = source_density_matrix(cfg, sigma);
    CHECK(rho.trace() == doctest::Approx(1.0));
    CHECK(rho.spacing <= 20e-9);
    const FwhmResult r = antidiagonal_fwhm(rho);
    CHECK_FALSE(r.window_limited);
    CHECK(r.fwhm < prev);
    prev = r.fwhm;
  }
}

TEST_CASE("calibration") {
  ExperimentConfig cfg;
  const auto zero = calibrate_source_width(cfg, 0.0);
  CHECK(zero.w1 == cfg.slit1_width);

  const auto c1 = calibrate_source_width(cfg, 1.0);
  const auto c2 = calibrate_source_width(cfg, 2.0);
  CHECK(c1.w1 > cfg.slit1_width);
  CHECK(c2.w1 > c1.w1);
  CHECK(c1.achieved_R == doctest::Approx(1.0).epsilon(0.05));
  CHECK(c2.achieved_R == doctest::Approx(2.0).epsilon(0.05));
  CHECK(c1.separation == doctest::Approx(c2.separation));
  CHECK(c1.w1 <= max_calibration_width(cfg));

  try {
    (void)calibrate_source_width(cfg, 500.0);
    FAIL("expected AnalysisError");
  } catch (const AnalysisError& e) {
    CHECK(std::string(e.what()).find("unreachable") != std::string::npos);
  }
  CHECK_THROWS_AS(calibrate_source_width(cfg, -1.0), DomainError);
}

TEST_CASE("anti-diagonal CSV") {
  AntidiagonalProfile p;
  p.separation = {0.0, 1e-8};
  p.magnitude = {0.5, 0.25};
  std::ostringstream os;
  write_antidiagonal_csv(os, p);
  CHECK(os.str().rfind("separation_m,magnitude\n", 0) == 0);
  CHECK(p.at(0.5e-8) == doctest::Approx(0.375));
  CHECK_THROWS_AS(p.at(2e-8), DomainError);
}
