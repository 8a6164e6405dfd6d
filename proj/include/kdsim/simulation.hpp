#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdsim/params.hpp"
#include "kdsim/pattern.hpp"
#include "kdsim/wall.hpp"

namespace kdsim {

struct RunTimings {
  double setup_s = 0.0;    // config checks, wall model, chain planning
  double sum_s = 0.0;      // incoherent sum over source nodes
  double analysis_s = 0.0; // detection, peaks, contrast, shift
  double total_s = 0.0;
};

struct RunResult {
  std::string run_id;
  ExperimentConfig config;
  std::string digest;
  wall::DecoherenceReport report;
  std::size_t source_nodes = 0;
  DiffractionPattern pattern;       // after detection convolution
  PeakSet peaks;
  double contrast = 0.0;            // NaN when undefined (see warnings)
  double shift = 0.0;               // order analysis.shift_order vs the no-plate reference; NaN if unresolved
  std::vector<std::string> warnings;
  RunTimings timings;
};

/// Runs the full pipeline: wall model, chain, incoherent source sum, detection,
/// peaks, contrast and the peak shift against the same configuration without
/// the plate. Reference peak sets are cached by configuration digest, so a
/// sweep computes each reference once. Not thread-safe; parallelism is inside.
class Simulator {
 public:
  RunResult run(const ExperimentConfig& cfg, const std::string& run_id);

  /// Detected pattern of a configuration (no analysis).
  static DiffractionPattern detected_pattern(const ExperimentConfig& cfg, const wall::DecoherenceReport& report);

 private:
  const PeakSet& reference_peaks(const ExperimentConfig& cfg);
  std::map<std::string, PeakSet> reference_cache_;
};

/// Same configuration with the plate removed (no wall interaction).
ExperimentConfig without_plate(const ExperimentConfig& cfg);

}  // namespace kdsim
