#pragma once

#include <vector>

#include "kdsim/params.hpp"

namespace kdsim {

/// One incoherent source point and its normalized Gaussian weight.
struct SourceNode {
  double chi = 0.0;
  double weight = 0.0;
};

struct GaussHermite {
  std::vector<double> nodes;    // roots of H_n, ascending
  std::vector<double> weights;  // for integral of exp(-x^2) f(x)
};

/// n-point Gauss-Hermite rule (Newton on the orthonormal recurrence).
GaussHermite gauss_hermite(std::size_t n);

/// Equally spaced nodes over +-span*sigma, odd count so chi = 0 is a node.
std::vector<SourceNode> uniform_source_nodes(double sigma, double span_sigmas, std::size_t count);

/// Gauss-Hermite nodes chi = sqrt(2) sigma x_i.
std::vector<SourceNode> gauss_hermite_source_nodes(double sigma, std::size_t count);

/// Node set for a Gaussian source of standard deviation sigma under the grid's
/// quadrature settings. sigma = 0 yields the single node chi = 0.
std::vector<SourceNode> source_nodes(double sigma, const NumericalGrid& grid);

}  // namespace kdsim
