#include "kdsim/simulation.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "kdsim/chain.hpp"
#include "kdsim/config_io.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/quadrature.hpp"

namespace kdsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ExperimentConfig without_plate(const ExperimentConfig& cfg) {
  ExperimentConfig ref = cfg;
  ref.plate_height.reset();
  return ref;
}

DiffractionPattern Simulator::detected_pattern(const ExperimentConfig& cfg, const wall::DecoherenceReport& report) {
  const Chain chain(cfg, report.beam_after_loss);
  const auto nodes = source_nodes(cfg.source_sigma(), cfg.grid);
  DiffractionPattern raw = incoherent_sum(chain, nodes);
  raw.meta = {cfg.laser_intensity, cfg.plate_height, cfg.slit1_width, report.delta_E_ev(), chain.order_spacing()};
  return detection_convolve(raw, cfg.detection_sigma);
}

const PeakSet& Simulator::reference_peaks(const ExperimentConfig& cfg) {
  const ExperimentConfig ref = without_plate(cfg);
  const std::string key = config_digest(ref);
  auto it = reference_cache_.find(key);
  if (it == reference_cache_.end()) {
    const auto report = wall::build_report(ref);
    it = reference_cache_.emplace(key, find_peaks(detected_pattern(ref, report), ref.analysis.peak_prominence)).first;
  }
  return it->second;
}

RunResult Simulator::run(const ExperimentConfig& cfg, const std::string& run_id) {
  const auto t0 = Clock::now();
  validate(cfg);
  RunResult r;
  r.run_id = run_id;
  r.config = cfg;
  r.digest = config_digest(cfg);
  r.report = wall::build_report(cfg);
  r.warnings = r.report.warnings;

  const Chain chain(cfg, r.report.beam_after_loss);
  const auto nodes = source_nodes(cfg.source_sigma(), cfg.grid);
  r.source_nodes = nodes.size();
  r.timings.setup_s = seconds_since(t0);

  const auto t1 = Clock::now();
  DiffractionPattern raw = incoherent_sum(chain, nodes);
  raw.meta = {cfg.laser_intensity, cfg.plate_height, cfg.slit1_width, r.report.delta_E_ev(), chain.order_spacing()};
  r.timings.sum_s = seconds_since(t1);

  const auto t2 = Clock::now();
  r.pattern = detection_convolve(raw, cfg.detection_sigma);
  r.peaks = find_peaks(r.pattern, cfg.analysis.peak_prominence);
  try {
    r.contrast = contrast(r.pattern, cfg.analysis.contrast_max_order);
  } catch (const AnalysisError& e) {
    r.contrast = kNaN;
    r.warnings.push_back(e.what());
  }
  try {
    const PeakSet& ref = cfg.has_plate() ? reference_peaks(cfg) : r.peaks;
    r.shift = peak_shift(ref, r.peaks, cfg.analysis.shift_order);
  } catch (const AnalysisError& e) {
    r.shift = kNaN;
    r.warnings.push_back(e.what());
  }
  r.timings.analysis_s = seconds_since(t2);
  r.timings.total_s = seconds_since(t0);
  return r;
}

}  // namespace kdsim
