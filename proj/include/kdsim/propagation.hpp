#pragma once

// Free-space propagation of a 1-D transverse field over a distance ell:
//
//   U(x_b) = sum_a u(x_a) exp(i k (sqrt((x_b - x_a)^2 + ell^2) - ell)) dx_a
//
// The exact route sums this kernel directly. The Fresnel route expands the
// square root to (x_b - x_a)^2 / (2 ell) and evaluates the resulting chirp
// convolution with FFTs (Bluestein form), which allows the output grid to have
// its own window and spacing. The constant exp(i k ell) is dropped and every
// output is renormalized to unit L2 norm.

#include <memory>
#include <span>

#include "kdsim/wave_field.hpp"

namespace kdsim {

/// Largest transverse separation between a point of `in` and a point of `out`
/// (both centred on the axis).
double max_separation(const PlaneGrid& in, const PlaneGrid& out);

/// Largest grid spacing that resolves the kernel chirp over separation D:
/// lambda ell / (2 D).
double max_chirp_spacing(double lambda, double distance, double separation);

enum class SamplingScope { input_only, input_and_output };

/// Throws SamplingError (with the minimum power-of-two sample count) when a leg
/// from `in` to `out` under-samples the kernel chirp. The output grid is checked
/// too when it carries a field that will be propagated further.
void check_sampling(const PlaneGrid& in, const PlaneGrid& out, double lambda, double distance,
                    SamplingScope scope, std::string_view leg_name);

/// Precomputed chirps and kernel spectrum for repeated Fresnel legs between two
/// fixed grids. Immutable after construction; execute() may run concurrently.
class FresnelPlan {
 public:
  FresnelPlan(const PlaneGrid& in, const PlaneGrid& out, double lambda, double distance);
  ~FresnelPlan();
  FresnelPlan(const FresnelPlan&) = delete;
  FresnelPlan& operator=(const FresnelPlan&) = delete;

  /// out[m] = dx_in sum_n in[n] exp(i pi (x_m - x_n)^2 / (lambda ell)); not normalized.
  void execute(std::span<const cplx> in, std::span<cplx> out) const;

  const PlaneGrid& input_grid() const { return in_; }
  const PlaneGrid& output_grid() const { return out_; }

 private:
  struct Impl;
  PlaneGrid in_, out_;
  std::unique_ptr<Impl> impl_;
};

/// One propagation leg between fixed grids, either route. Sparse inputs (few
/// nonzero samples) are summed directly, which is the same discrete sum.
class Propagator {
 public:
  Propagator(const PlaneGrid& in, const PlaneGrid& out, double lambda, double distance,
             PropagationMethod method, Plane out_plane);

  /// Propagates and renormalizes to unit L2 norm.
  WaveField operator()(const WaveField& field) const { return apply(field, true); }
  WaveField apply(const WaveField& field, bool normalize) const;

  double lambda() const { return lambda_; }
  double distance() const { return distance_; }

 private:
  PlaneGrid in_, out_;
  double lambda_, distance_;
  PropagationMethod method_;
  Plane out_plane_;
  std::shared_ptr<const FresnelPlan> plan_;
};

/// Propagates onto `out_grid` (defaults to the input grid) and labels the result
/// `out_plane`. Validates sampling first.
WaveField propagate(const WaveField& field, double distance, PropagationMethod method,
                    const PlaneGrid& out_grid, Plane out_plane);
WaveField propagate(const WaveField& field, double distance, PropagationMethod method);

}  // namespace kdsim
