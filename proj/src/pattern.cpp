#include "kdsim/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kdsim/chain.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/simd/kernels.hpp"

namespace kdsim {

namespace {

constexpr std::size_t kBatch = 64;

void normalize_area(DiffractionPattern& p) {
  const double a = p.area();
  if (!(a > 0.0)) throw AnalysisError("pattern has zero total probability");
  for (auto& d : p.density) d /= a;
}

bool same_screen(const WaveField& a, const WaveField& b) {
  return a.size() == b.size() && std::abs(a.spacing - b.spacing) <= 1e-12 * a.spacing &&
         std::abs(a.origin - b.origin) <= 1e-9 * a.spacing;
}

}  // namespace

double DiffractionPattern::area() const { return std::accumulate(density.begin(), density.end(), 0.0) * spacing; }

double DiffractionPattern::centroid() const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    num += density[i] * x(i);
    den += density[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

double DiffractionPattern::max() const {
  return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
}

DiffractionPattern incoherent_sum(std::span<const WaveField> fields, std::span<const double> weights) {
  if (fields.empty()) throw DomainError("incoherent_sum: no fields");
  if (fields.size() != weights.size()) throw DomainError("incoherent_sum: fields and weights differ in length");
  DiffractionPattern p;
  p.spacing = fields.front().spacing;
  p.origin = fields.front().origin;
  p.density.assign(fields.front().size(), 0.0);
  const auto& k = simd::active();
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (!same_screen(fields[f], fields.front()))
      throw DomainError("incoherent_sum: field " + std::to_string(f) + " is on a different screen grid");
    k.accumulate_intensity(p.density.data(), fields[f].amplitudes.data(), p.size(), weights[f]);
  }
  normalize_area(p);
  return p;
}

DiffractionPattern incoherent_sum(const Chain& chain, std::span<const SourceNode> nodes) {
  if (nodes.empty()) throw DomainError("incoherent_sum: no source nodes");
  const auto& k = simd::active();
  const PlaneGrid& screen = chain.config().grid.screen;
  DiffractionPattern p;
  p.spacing = screen.spacing();
  p.origin = screen.origin();
  p.density.assign(screen.samples, 0.0);

  std::vector<WaveField> batch(std::min(kBatch, nodes.size()));
  for (std::size_t b0 = 0; b0 < nodes.size(); b0 += kBatch) {
    const std::size_t nb = std::min(kBatch, nodes.size() - b0);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(nb); ++i)
      batch[static_cast<std::size_t>(i)] = chain.at_screen(nodes[b0 + static_cast<std::size_t>(i)].chi);
    for (std::size_t i = 0; i < nb; ++i)
      k.accumulate_intensity(p.density.data(), batch[i].amplitudes.data(), p.size(), nodes[b0 + i].weight);
  }
  normalize_area(p);
  return p;
}

DiffractionPattern detection_convolve(const DiffractionPattern& p, double sigma_d) {
  if (!(sigma_d >= 0.0)) throw DomainError("detection_convolve: sigma_d must be nonnegative");
  if (sigma_d == 0.0 || p.size() == 0) return p;
  const auto n = static_cast<long long>(p.size());
  const auto half = std::min<long long>(n - 1, static_cast<long long>(std::ceil(8.0 * sigma_d / p.spacing)));
  std::vector<double> ker(static_cast<std::size_t>(2 * half + 1));
  for (long long j = -half; j <= half; ++j) {
    const double t = static_cast<double>(j) * p.spacing / sigma_d;
    ker[static_cast<std::size_t>(j + half)] = std::exp(-0.5 * t * t);
  }
  const double ks = std::accumulate(ker.begin(), ker.end(), 0.0);
  for (auto& v : ker) v /= ks;

  DiffractionPattern out = p;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    double acc = 0.0;
    const long long lo = std::max(-half, -i), hi = std::min(half, n - 1 - i);
    for (long long j = lo; j <= hi; ++j)
      acc += ker[static_cast<std::size_t>(j + half)] * p.density[static_cast<std::size_t>(i + j)];
    out.density[static_cast<std::size_t>(i)] = acc;
  }
  normalize_area(out);
  return out;
}

std::optional<std::size_t> PeakSet::find(int order) const {
  const auto it = std::find(orders.begin(), orders.end(), order);
  if (it == orders.end()) return std::nullopt;
  return static_cast<std::size_t>(it - orders.begin());
}

int PeakSet::resolved_orders() const {
  if (!find(0)) return -1;
  int n = 0;
  while (find(n + 1) && find(-(n + 1))) ++n;
  return n;
}

PeakSet find_peaks(const DiffractionPattern& p, double min_prominence) {
  PeakSet set;
  const auto& d = p.density;
  const std::size_t n = d.size();
  if (n < 3) return set;
  const double threshold = min_prominence * p.max();

  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(d[i] > d[i - 1] && d[i] >= d[i + 1])) continue;
    // Prominence: height above the higher of the two minima reached before
    // climbing above this peak (or hitting an edge) on either side.
    double left = d[i];
    for (std::size_t j = i; j-- > 0;) {
      if (d[j] > d[i]) break;
      left = std::min(left, d[j]);
    }
    double right = d[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[j] > d[i]) break;
      right = std::min(right, d[j]);
    }
    if (d[i] - std::max(left, right) >= threshold && d[i] > 0.0) idx.push_back(i);
  }
  if (idx.empty()) return set;

  for (std::size_t i : idx) {
    const double a = d[i - 1], b = d[i], c = d[i + 1];
    const double den = a - 2.0 * b + c;
    const double delta = den < 0.0 ? std::clamp(0.5 * (a - c) / den, -0.5, 0.5) : 0.0;
    set.positions.push_back(p.x(i) + delta * p.spacing);
    set.heights.push_back(b - 0.25 * (a - c) * delta);
  }
  const double cx = p.centroid();
  std::size_t zero = 0;
  for (std::size_t k = 1; k < set.positions.size(); ++k)
    if (std::abs(set.positions[k] - cx) < std::abs(set.positions[zero] - cx)) zero = k;
  for (std::size_t k = 0; k < set.positions.size(); ++k)
    set.orders.push_back(static_cast<int>(k) - static_cast<int>(zero));
  return set;
}

double contrast(const DiffractionPattern& p, double lo, double hi) {
  double mx = -1.0, mn = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p.x(i);
    if (x < lo || x > hi) continue;
    if (mx < 0.0) mx = mn = p.density[i];
    mx = std::max(mx, p.density[i]);
    mn = std::min(mn, p.density[i]);
  }
  if (mx < 0.0) throw AnalysisError("contrast: region contains no samples");
  return mx + mn > 0.0 ? (mx - mn) / (mx + mn) : 0.0;
}

double contrast(const DiffractionPattern& p, int max_order) {
  if (max_order < 1) throw AnalysisError("contrast: need at least order 1 in the region");
  if (!(p.meta.order_spacing > 0.0)) throw AnalysisError("contrast: pattern has no order spacing");
  const double c = p.centroid();
  const double half = max_order * p.meta.order_spacing;
  return contrast(p, c - half, c + half);
}

double peak_shift(const PeakSet& reference, const PeakSet& shifted, int order) {
  if (order == 0) throw DomainError("peak_shift: order 0 has no shift");
  auto pos = [&](const PeakSet& s, const char* name, int n) {
    const auto i = s.find(n);
    const auto z = s.find(0);
    if (!i || !z) {
      std::ostringstream msg;
      msg << "peak_shift: order " << (i ? 0 : n) << " missing from the " << name << " peak set ("
          << s.resolved_orders() << " orders resolved each side)";
      throw AnalysisError(msg.str());
    }
    return std::abs(s.positions[*i] - s.positions[*z]);
  };
  double sum = 0.0;
  for (int n : {order, -order}) {
    const double r = pos(reference, "reference", n);
    const double s = pos(shifted, "shifted", n);
    sum += (s - r) / r;
  }
  return 0.5 * sum;
}

double OrderPopulations::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

OrderPopulations raman_nath_oracle(double phi, int max_order) {
  if (!(phi >= 0.0)) throw DomainError("raman_nath_oracle: phase amplitude must be nonnegative");
  if (max_order < 0) throw DomainError("raman_nath_oracle: max_order must be nonnegative");
  OrderPopulations op;
  op.max_order = max_order;
  for (int n = -max_order; n <= max_order; ++n) {
    const double j = std::cyl_bessel_j(static_cast<double>(std::abs(n)), phi);
    op.values.push_back(j * j);
  }
  return op;
}

OrderPopulations order_populations(const DiffractionPattern& p, double centre, double spacing, int max_order) {
  if (!(spacing > 0.0) || max_order < 0) throw DomainError("order_populations: bad spacing or order range");
  OrderPopulations op;
  op.max_order = max_order;
  op.values.assign(static_cast<std::size_t>(2 * max_order + 1), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long n = std::lround((p.x(i) - centre) / spacing);
    if (std::abs(n) <= max_order) op.values[static_cast<std::size_t>(n + max_order)] += p.density[i] * p.spacing;
  }
  return op;
}

double mirror_asymmetry(const DiffractionPattern& p) {
  const double fc = -p.origin / p.spacing;
  const long c = std::lround(fc);
  if (std::abs(fc - static_cast<double>(c)) > 1e-6) throw DomainError("mirror_asymmetry: x = 0 is not a grid node");
  const long n = static_cast<long>(p.size());
  const long reach = std::min(c, n - 1 - c);
  double worst = 0.0;
  for (long k = 1; k <= reach; ++k)
    worst = std::max(worst, std::abs(p.density[static_cast<std::size_t>(c + k)] - p.density[static_cast<std::size_t>(c - k)]));
  const double m = p.max();
  return m > 0.0 ? worst / m : 0.0;
}

void write_pattern_csv(std::ostream& os, const DiffractionPattern& p) {
  os << "position_m,density_per_m\n";
  os.precision(12);
  for (std::size_t i = 0; i < p.size(); ++i) os << p.x(i) << ',' << p.density[i] << '\n';
}

}  // namespace kdsim
