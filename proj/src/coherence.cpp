#include "kdsim/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "kdsim/chain.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/quadrature.hpp"
#include "kdsim/simd/kernels.hpp"

namespace kdsim {

namespace {

// Normalized coherence terms below this are rounding noise of the rank-1 sums.
constexpr double kCoherenceFloor = 1e-12;
constexpr std::size_t kRowBlock = 16;

bool same_grid(const WaveField& a, const WaveField& b) {
  return a.size() == b.size() && std::abs(a.spacing - b.spacing) <= 1e-12 * a.spacing &&
         std::abs(a.origin - b.origin) <= 1e-9 * a.spacing;
}

std::size_t nearest_index(const DensityMatrixSlice& rho, double x) {
  const double f = std::round((x - rho.origin) / rho.spacing);
  return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(rho.n - 1)));
}

}  // namespace

double DensityMatrixSlice::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) t += values[i * n + i].real();
  return t;
}

double DensityMatrixSlice::centroid() const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i * n + i].real();
    num += d * x(i);
    den += d;
  }
  return den > 0.0 ? num / den : 0.0;
}

double DensityMatrixSlice::hermiticity_error() const {
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(values[i * n + j]));
      worst = std::max(worst, std::abs(values[i * n + j] - std::conj(values[j * n + i])));
    }
  return scale > 0.0 ? worst / scale : 0.0;
}

WaveField crop_field(const WaveField& f, const DensityWindow& window) {
  if (f.size() == 0) throw DomainError("crop_field: empty field");
  if (window.max_points < 1) throw DomainError("crop_field: max_points must be positive");
  // Node nearest x = 0, then a symmetric run of every d-th sample about it.
  const double fc = std::round(-f.origin / f.spacing);
  const auto last = static_cast<double>(f.size() - 1);
  const auto ic = static_cast<std::size_t>(std::clamp(fc, 0.0, last));
  std::size_t reach = std::min(ic, f.size() - 1 - ic);
  if (window.half_width) {
    if (!(*window.half_width > 0.0)) throw DomainError("crop_field: half_width must be positive");
    reach = std::min(reach, static_cast<std::size_t>(std::floor(*window.half_width / f.spacing)));
  }
  std::size_t dec = 1;
  while (2 * (reach / dec) + 1 > window.max_points) ++dec;
  const std::size_t k = reach / dec;

  WaveField out;
  out.amplitudes.resize(2 * k + 1);
  out.spacing = f.spacing * static_cast<double>(dec);
  out.origin = f.x(ic - k * dec);
  out.plane = f.plane;
  out.lambda_dB = f.lambda_dB;
  for (std::size_t m = 0; m < out.size(); ++m) out.amplitudes[m] = f.amplitudes[ic - k * dec + m * dec];
  return out;
}

namespace {

std::size_t decimation_of(const WaveField& full, const WaveField& cropped) {
  return static_cast<std::size_t>(std::lround(cropped.spacing / full.spacing));
}

DensityMatrixSlice accumulate(std::span<const WaveField> fields, std::span<const double> weights,
                              std::size_t decimation) {
  const WaveField& first = fields.front();
  DensityMatrixSlice rho;
  rho.n = first.size();
  rho.spacing = first.spacing;
  rho.origin = first.origin;
  rho.plane = first.plane;
  rho.decimation = decimation;
  rho.values.assign(rho.n * rho.n, cplx{});

  const auto& k = simd::active();
  const std::size_t n = rho.n;
  const auto blocks = static_cast<long long>((n + kRowBlock - 1) / kRowBlock);
  // Each block of rows sums the fields in the same fixed order: deterministic.
#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < blocks; ++b) {
    const std::size_t r0 = static_cast<std::size_t>(b) * kRowBlock;
    const std::size_t r1 = std::min(n, r0 + kRowBlock);
    for (std::size_t f = 0; f < fields.size(); ++f)
      if (weights[f] != 0.0) k.rank1_update(rho.values.data(), fields[f].amplitudes.data(), n, r0, r1, weights[f]);
  }

  const double tr = rho.trace();
  if (!(tr > 0.0)) throw DomainError("density_matrix: zero trace (all fields vanish in the window)");
  for (auto& v : rho.values) v /= tr;
  return rho;
}

void check_inputs(std::span<const WaveField> fields, std::span<const double> weights) {
  if (fields.empty()) throw DomainError("density_matrix: need at least one field");
  if (fields.size() != weights.size()) throw DomainError("density_matrix: fields and weights differ in length");
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (!same_grid(fields[f], fields.front()))
      throw DomainError("density_matrix: field " + std::to_string(f) + " is on a different grid");
    if (!(weights[f] >= 0.0)) throw DomainError("density_matrix: weights must be nonnegative");
  }
}

}  // namespace

DensityMatrixSlice density_matrix(std::span<const WaveField> fields, std::span<const double> weights,
                                  const DensityWindow& window) {
  check_inputs(fields, weights);
  std::vector<WaveField> cropped;
  cropped.reserve(fields.size());
  for (const auto& f : fields) cropped.push_back(crop_field(f, window));
  return accumulate(cropped, weights, decimation_of(fields.front(), cropped.front()));
}

double AntidiagonalProfile::at(double s) const {
  if (separation.empty()) throw DomainError("antidiagonal profile is empty");
  if (s < 0.0) s = -s;
  if (s > separation.back() * (1.0 + 1e-12))
    throw DomainError("separation exceeds the anti-diagonal extent of the window");
  const auto it = std::upper_bound(separation.begin(), separation.end(), s);
  if (it == separation.end()) return magnitude.back();
  const auto hi = static_cast<std::size_t>(it - separation.begin());
  const std::size_t lo = hi - 1;
  const double t = (s - separation[lo]) / (separation[hi] - separation[lo]);
  return magnitude[lo] + t * (magnitude[hi] - magnitude[lo]);
}

AntidiagonalProfile antidiagonal_profile(const DensityMatrixSlice& rho, std::size_t c) {
  if (c >= rho.n) throw DomainError("antidiagonal_profile: centre index outside the grid");
  AntidiagonalProfile p;
  p.center = rho.x(c);
  for (std::size_t m = 0;; ++m) {
    const std::size_t k = m / 2;
    const std::size_t i = c + k + (m % 2);
    if (k > c || i >= rho.n) break;
    p.separation.push_back(static_cast<double>(m) * rho.spacing);
    p.magnitude.push_back(std::abs(rho(i, c - k)));
  }
  return p;
}

AntidiagonalProfile antidiagonal_profile(const DensityMatrixSlice& rho) {
  return antidiagonal_profile(rho, nearest_index(rho, rho.centroid()));
}

FwhmResult antidiagonal_fwhm(const AntidiagonalProfile& p) {
  if (p.magnitude.empty() || !(p.magnitude.front() > 0.0))
    throw DomainError("antidiagonal_fwhm: zero diagonal at the centre");
  const double half = 0.5 * p.magnitude.front();
  for (std::size_t m = 1; m < p.magnitude.size(); ++m) {
    if (p.magnitude[m] <= half) {
      const double a = p.magnitude[m - 1], b = p.magnitude[m];
      const double t = (a - half) / (a - b);
      return {2.0 * (p.separation[m - 1] + t * (p.separation[m] - p.separation[m - 1])), false, {}};
    }
  }
  FwhmResult r;
  r.fwhm = 2.0 * p.separation.back();
  r.window_limited = true;
  std::ostringstream msg;
  msg << "anti-diagonal stays above half maximum across the window; FWHM reported as the window limit "
      << r.fwhm << " m";
  r.warning = msg.str();
  return r;
}

FwhmResult antidiagonal_fwhm(const DensityMatrixSlice& rho) { return antidiagonal_fwhm(antidiagonal_profile(rho)); }

double coherence_ratio(const DensityMatrixSlice& rho_dec, const DensityMatrixSlice& rho_in, double separation) {
  if (rho_dec.n != rho_in.n || std::abs(rho_dec.spacing - rho_in.spacing) > 1e-12 * rho_in.spacing ||
      std::abs(rho_dec.origin - rho_in.origin) > 1e-9 * rho_in.spacing)
    throw DomainError("coherence_ratio: density matrices are on different grids");
  const std::size_t c = nearest_index(rho_in, rho_in.centroid());
  const AntidiagonalProfile p_in = antidiagonal_profile(rho_in, c);
  const AntidiagonalProfile p_dec = antidiagonal_profile(rho_dec, c);
  const double r_in = p_in.at(separation) / p_in.magnitude.front();
  if (!(r_in > kCoherenceFloor)) {
    std::ostringstream msg;
    msg << "coherence_ratio: reference coherence term " << r_in << " at separation " << separation
        << " m is below the numerical floor " << kCoherenceFloor;
    throw AnalysisError(msg.str());
  }
  if (!(p_dec.magnitude.front() > 0.0)) throw AnalysisError("coherence_ratio: zero diagonal in rho_dec");
  return (p_dec.at(separation) / p_dec.magnitude.front()) / r_in;
}

DensityMatrixSlice source_density_matrix(const ExperimentConfig& cfg, double sigma_e) {
  const Chain chain(cfg, derive_beam(cfg.beam_energy_ev));
  const auto nodes = source_nodes(sigma_e, cfg.grid);
  const DensityWindow window{cfg.analysis.density_half_width, cfg.analysis.density_max_points};

  std::vector<WaveField> cropped(nodes.size());
  std::vector<double> weights(nodes.size());
  std::size_t decimation = 1;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(nodes.size()); ++i) {
    const auto u = static_cast<std::size_t>(i);
    const WaveField full = chain.before_laser(nodes[u].chi);
    cropped[u] = crop_field(full, window);
    weights[u] = nodes[u].weight;
    if (u == 0) decimation = decimation_of(full, cropped[u]);
  }
  return accumulate(cropped, weights, decimation);
}

double max_calibration_width(const ExperimentConfig& cfg) {
  const auto& g = cfg.grid;
  const double reach = 0.5 * g.source.window - g.source.spacing();
  double outermost = g.source_span_sigmas;  // node extent in units of sigma
  if (g.source_rule == SourceRule::gauss_hermite)
    outermost = std::sqrt(2.0) * gauss_hermite(std::max<std::size_t>(g.source_points, 1)).nodes.back();
  return cfg.source_width(reach / outermost);
}

CalibrationResult calibrate_source_width(const ExperimentConfig& cfg, double target_R,
                                         std::optional<double> separation) {
  if (!(target_R >= 0.0)) throw DomainError("calibrate_source_width: target R must be nonnegative");
  validate(cfg);
  const double base = cfg.slit1_width;
  CalibrationResult res;
  res.target_R = target_R;

  const DensityMatrixSlice rho_base = source_density_matrix(cfg, cfg.source_sigma(base));
  if (!separation) separation = cfg.analysis.calibration_separation;
  if (!separation) {
    const FwhmResult f = antidiagonal_fwhm(rho_base);
    if (f.window_limited)
      throw AnalysisError("calibrate_source_width: baseline coherence exceeds the density window; " + f.warning);
    separation = 0.5 * f.fwhm;
  }
  res.separation = *separation;

  auto R_of = [&](double w) {
    ++res.evaluations;
    const double ratio = coherence_ratio(source_density_matrix(cfg, cfg.source_sigma(w)), rho_base, res.separation);
    return -std::log(std::max(ratio, kCoherenceFloor));
  };

  if (target_R == 0.0) {
    res.w1 = base;
    return res;
  }
  const double wmax = max_calibration_width(cfg);
  if (!(wmax > base)) {
    std::ostringstream msg;
    msg << "calibrate_source_width: baseline w1 = " << base << " m already fills the source window (max "
        << wmax << " m)";
    throw AnalysisError(msg.str());
  }
  const double R_hi = R_of(wmax);
  if (R_hi < target_R) {
    std::ostringstream msg;
    msg << "calibrate_source_width: target R = " << target_R << " unreachable; w1 in [" << base << ", " << wmax
        << "] m gives R in [0, " << R_hi << "] at separation " << res.separation << " m";
    if (R_hi >= -std::log(kCoherenceFloor) * (1.0 - 1e-9))
      msg << " (coherence ratio saturates at the numerical floor " << kCoherenceFloor << ")";
    throw AnalysisError(msg.str());
  }

  double lo = base, hi = wmax;
  while (hi / lo > 1.01) {
    const double mid = std::sqrt(lo * hi);
    (R_of(mid) < target_R ? lo : hi) = mid;
  }
  res.w1 = std::sqrt(lo * hi);
  res.achieved_R = R_of(res.w1);
  return res;
}

void write_antidiagonal_csv(std::ostream& os, const AntidiagonalProfile& p) {
  os << "separation_m,magnitude\n";
  os.precision(10);
  for (std::size_t m = 0; m < p.separation.size(); ++m) os << p.separation[m] << ',' << p.magnitude[m] << '\n';
}

}  // namespace kdsim
