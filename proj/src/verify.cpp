#include "kdsim/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "kdsim/errors.hpp"
#include "kdsim/optics.hpp"
#include "kdsim/pattern.hpp"
#include "kdsim/propagation.hpp"
#include "kdsim/simd/kernels.hpp"
#include "kdsim/wall.hpp"

namespace kdsim {

namespace {

struct Tol {
  double expected, rel;
};

bool near_rel(double got, Tol t) { return std::abs(got - t.expected) <= t.rel * std::abs(t.expected); }

std::string str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ExperimentConfig plate_config(double h) {
  ExperimentConfig cfg;
  cfg.plate_height = h;
  return cfg;
}

// Small free-space test grid; the sample count may be forced from the environment.
PlaneGrid verify_grid() {
  PlaneGrid g{40e-6, 1024};
  if (const char* s = std::getenv("KDSIM_VERIFY_SAMPLES")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 2) throw ConfigError(std::string("KDSIM_VERIFY_SAMPLES: bad value \"") + s + "\"");
    g.samples = static_cast<std::size_t>(v);
  }
  return g;
}

WaveField gaussian(const PlaneGrid& g, double a, double lambda) {
  WaveField f(g, Plane::slit2, lambda);
  for (std::size_t i = 0; i < f.size(); ++i) f.amplitudes[i] = std::exp(-0.5 * f.x(i) * f.x(i) / (a * a));
  f.normalize();
  return f;
}

double rms_width(const WaveField& f) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double p = std::norm(f.amplitudes[i]);
    m0 += p;
    m1 += p * f.x(i);
    m2 += p * f.x(i) * f.x(i);
  }
  const double mu = m1 / m0;
  return std::sqrt(m2 / m0 - mu * mu);
}

template <class F>
VerifyCheck guarded(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, e.what()};
  }
}

VerifyCheck check_energy_loss() {
  const double e2 = wall::build_report(plate_config(2e-6)).delta_E_ev();
  const double e1 = wall::build_report(plate_config(1e-6)).delta_E_ev();
  const bool ok = near_rel(e2, {68.0, 0.10}) && near_rel(e1, {545.0, 0.10}) && near_rel(e1 / e2, {8.0, 0.01});
  return {"energy_loss", ok, "dE(2um)=" + str(e2) + " eV, dE(1um)=" + str(e1) + " eV, ratio=" + str(e1 / e2)};
}

VerifyCheck check_decoherence() {
  const double r2 = wall::build_report(plate_config(2e-6)).R_dec;
  const double r1 = wall::build_report(plate_config(1e-6)).R_dec;
  const bool ok = near_rel(r2, {2.185, 0.10}) && near_rel(r1, {69.9, 0.10}) && near_rel(r1 / r2, {32.0, 1e-6});
  return {"decoherence_amount", ok, "R(2um)=" + str(r2) + ", R(1um)=" + str(r1) + ", ratio=" + str(r1 / r2)};
}

VerifyCheck check_bessel() {
  const auto pops = raman_nath_oracle(0.846, 40);
  const double err = std::abs(pops.sum() - 1.0);
  return {"bessel_sum_rule", err < 1e-10, "|sum J_n^2 - 1| = " + str(err)};
}

VerifyCheck check_waist(PropagationMethod method, const char* name) {
  return guarded(name, [&] {
    const PlaneGrid g = verify_grid();
    const double lambda = derive_beam(2500.0).lambda_dB;
    const double a = 1e-6, z = 0.5;
    const WaveField out = propagate(gaussian(g, a, lambda), z, method);
    const double k = 2.0 * std::numbers::pi / lambda;
    const double expected = a * std::sqrt(0.5 * (1.0 + std::pow(z / (k * a * a), 2)));
    const double got = rms_width(out);
    return VerifyCheck{name, near_rel(got, {expected, 0.005}),
                       "rms width " + str(got) + " m vs analytic " + str(expected) + " m"};
  });
}

VerifyCheck check_routes() {
  return guarded("exact_vs_fresnel", [&] {
    const PlaneGrid g = verify_grid();
    const double lambda = derive_beam(2500.0).lambda_dB;
    const WaveField in = gaussian(g, 0.7e-6, lambda);
    const WaveField a = propagate(in, 0.25, PropagationMethod::exact);
    const WaveField b = propagate(in, 0.25, PropagationMethod::fresnel);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += std::norm(a.amplitudes[i] - b.amplitudes[i]);
      den += std::norm(b.amplitudes[i]);
    }
    const double rel = std::sqrt(num / den);
    return VerifyCheck{"exact_vs_fresnel", rel < 1e-3, "relative L2 difference " + str(rel)};
  });
}

VerifyCheck check_unitarity() {
  const PlaneGrid g{64e-6, 4096};
  WaveField f = gaussian(g, 5e-6, 2.45e-11);
  const double before = f.l2_norm();
  const LaserGrating gr = make_grating(18e14, 532e-9, 4.2e-12);
  f = apply_laser_phase(std::move(f), gr);
  const double err = std::abs(f.l2_norm() - before);
  return {"laser_phase_unitarity", err < 1e-12, "norm change " + str(err)};
}

VerifyCheck check_simd() {
  const auto& ref = simd::scalar_table();
  const auto& act = simd::active();
  if (&ref == &act) return {"simd_equivalence", true, "active kernels are the scalar reference"};
  constexpr std::size_t n = 1027;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<cplx> u(n), v(n);
  for (auto& z : u) z = {U(rng), U(rng)};
  for (auto& z : v) z = {U(rng), U(rng)};

  double worst = 0.0;
  auto diff = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  };
  {
    auto a = u, b = u;
    ref.complex_multiply(a.data(), v.data(), n);
    act.complex_multiply(b.data(), v.data(), n);
    diff(a, b);
  }
  {
    std::vector<cplx> a(n), b(n);
    ref.spherical_accumulate(a.data(), n, -20e-6, 40e-9, 1e-6, {0.3, -0.2}, 2.56e11, 0.01);
    act.spherical_accumulate(b.data(), n, -20e-6, 40e-9, 1e-6, {0.3, -0.2}, 2.56e11, 0.01);
    diff(a, b);
  }
  {
    auto a = u, b = u;
    ref.standing_wave_phase(a.data(), n, -30e-6, 60e-9, 1.18e7, 0.0, 1.7);
    act.standing_wave_phase(b.data(), n, -30e-6, 60e-9, 1.18e7, 0.0, 1.7);
    diff(a, b);
  }
  const std::string isa(simd::to_string(act.isa));
  return {"simd_equivalence", worst < 1e-10, isa + " vs scalar max deviation " + str(worst)};
}

}  // namespace

std::vector<VerifyCheck> run_verification() {
  return {check_energy_loss(),
          check_decoherence(),
          check_bessel(),
          check_waist(PropagationMethod::fresnel, "gaussian_waist_fresnel"),
          check_waist(PropagationMethod::exact, "gaussian_waist_exact"),
          check_routes(),
          check_unitarity(),
          check_simd()};
}

}  // namespace kdsim
