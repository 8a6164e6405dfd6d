#pragma once

#include "kdsim/optics.hpp"
#include "kdsim/propagation.hpp"

namespace kdsim {

/// Source point -> Gaussian slit 2 -> laser plane -> phase grating -> screen,
/// with every leg planned once. The source-to-slit leg uses the initial beam;
/// everything after slit 2 uses the beam after the wall energy loss.
/// Immutable after construction, so per-chi calls may run in parallel.
class Chain {
 public:
  /// Validates the configuration and the sampling of all three legs.
  Chain(const ExperimentConfig& cfg, const BeamState& beam_after_loss);

  WaveField at_slit(double chi) const;
  WaveField before_laser(double chi) const;
  WaveField at_screen(double chi) const;

  /// Arbitrary source-plane field through the chain. With normalize = false
  /// the map is linear in the input.
  WaveField screen_from_source(const WaveField& source, bool normalize = true) const;

  const LaserGrating& grating() const { return grating_; }
  const BeamState& initial_beam() const { return beam0_; }
  const BeamState& beam_after_loss() const { return beam_; }
  const ExperimentConfig& config() const { return cfg_; }

  /// Nominal spacing of diffraction orders on the screen, lambda_dB L / (lambda_laser / 2).
  double order_spacing() const;

 private:
  ExperimentConfig cfg_;
  BeamState beam0_, beam_;
  LaserGrating grating_;
  Propagator to_slit_, to_laser_, to_screen_;
};

/// Single source point through the whole chain; returns the screen field.
WaveField run_chain(const ExperimentConfig& cfg, double chi, const BeamState& beam_after_loss);

}  // namespace kdsim
