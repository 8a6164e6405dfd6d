#include "kdsim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdsim/errors.hpp"

namespace kdsim {

GaussHermite gauss_hermite(std::size_t n) {
  if (n == 0) throw DomainError("gauss_hermite: need at least one node");
  GaussHermite gh;
  gh.nodes.assign(n, 0.0);
  gh.weights.assign(n, 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const double nd = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    // Asymptotic starting guesses for the largest roots, then extrapolation.
    if (i == 0)
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(nd, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * gh.nodes[n - 1];
    else if (i == 3)
      z = 1.91 * z - 0.91 * gh.nodes[n - 2];
    else
      z = 2.0 * z - gh.nodes[n - i + 1];

    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    gh.nodes[n - 1 - i] = z;
    gh.nodes[i] = -z;
    gh.weights[i] = gh.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) gh.nodes[n / 2] = 0.0;
  return gh;
}

std::vector<SourceNode> uniform_source_nodes(double sigma, double span_sigmas, std::size_t count) {
  if (sigma < 0.0 || !(span_sigmas > 0.0)) throw DomainError("uniform_source_nodes: bad sigma or span");
  if (sigma == 0.0 || count <= 1) return {{0.0, 1.0}};
  if (count % 2 == 0) ++count;
  const double half = span_sigmas * sigma;
  const double h = 2.0 * half / static_cast<double>(count - 1);
  const auto mid = static_cast<long long>(count / 2);
  std::vector<SourceNode> nodes(count);
  double total = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double chi = static_cast<double>(static_cast<long long>(j) - mid) * h;
    nodes[j] = {chi, std::exp(-0.5 * chi * chi / (sigma * sigma))};
    total += nodes[j].weight;
  }
  for (auto& n : nodes) n.weight /= total;
  return nodes;
}

std::vector<SourceNode> gauss_hermite_source_nodes(double sigma, std::size_t count) {
  if (sigma < 0.0) throw DomainError("gauss_hermite_source_nodes: negative sigma");
  if (sigma == 0.0 || count <= 1) return {{0.0, 1.0}};
  const GaussHermite gh = gauss_hermite(count);
  std::vector<SourceNode> nodes(count);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    nodes[i] = {std::sqrt(2.0) * sigma * gh.nodes[i], gh.weights[i]};
    total += gh.weights[i];
  }
  for (auto& n : nodes) n.weight /= total;
  return nodes;
}

std::vector<SourceNode> source_nodes(double sigma, const NumericalGrid& grid) {
  if (sigma == 0.0) return {{0.0, 1.0}};
  if (grid.source_rule == SourceRule::gauss_hermite) return gauss_hermite_source_nodes(sigma, grid.source_points);
  const double span = 2.0 * grid.source_span_sigmas * sigma;
  const auto by_spacing = static_cast<std::size_t>(std::ceil(span / grid.source_node_spacing * (1.0 - 1e-12))) + 1;
  return uniform_source_nodes(sigma, grid.source_span_sigmas, std::max(grid.source_points, by_spacing));
}

}  // namespace kdsim
