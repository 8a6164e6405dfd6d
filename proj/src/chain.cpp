#include "kdsim/chain.hpp"

#include <string>

#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

template <class F>
auto stage(const char* label, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError(std::string(label) + ": " + e.what());
  }
}

const ExperimentConfig& validated(const ExperimentConfig& cfg) {
  validate(cfg);
  return cfg;
}

}  // namespace

Chain::Chain(const ExperimentConfig& cfg, const BeamState& beam_after_loss)
    : cfg_(validated(cfg)),
      beam0_(derive_beam(cfg.beam_energy_ev)),
      beam_(beam_after_loss),
      grating_(make_grating(cfg.laser_intensity, cfg.laser_wavelength,
                            laser_crossing_time(cfg.laser_waist, beam_after_loss), cfg.laser_offset)),
      to_slit_(cfg.grid.source, cfg.grid.slit, beam0_.lambda_dB, cfg.dist_source_slit2, cfg.grid.method,
               Plane::slit2),
      to_laser_(cfg.grid.slit, cfg.grid.laser, beam_.lambda_dB, cfg.dist_slit2_laser(), cfg.grid.method,
                Plane::before_laser),
      to_screen_(cfg.grid.laser, cfg.grid.screen, beam_.lambda_dB, cfg.dist_laser_screen, cfg.grid.method,
                 Plane::screen) {}

WaveField Chain::at_slit(double chi) const {
  WaveField src = stage("source", [&] { return point_source(chi, cfg_.grid.source, beam0_.lambda_dB); });
  WaveField slit = stage("source->slit2", [&] { return to_slit_(src); });
  slit.lambda_dB = beam_.lambda_dB;
  return stage("slit2", [&] { return apply_gaussian_slit(std::move(slit), cfg_.slit2_width); });
}

WaveField Chain::before_laser(double chi) const {
  WaveField slit = at_slit(chi);
  return stage("slit2->laser", [&] { return to_laser_(slit); });
}

WaveField Chain::at_screen(double chi) const {
  WaveField bl = before_laser(chi);
  WaveField after = stage("laser", [&] { return apply_laser_phase(std::move(bl), grating_); });
  return stage("laser->screen", [&] { return to_screen_(after); });
}

WaveField Chain::screen_from_source(const WaveField& source, bool normalize) const {
  WaveField slit = to_slit_.apply(source, normalize);
  slit.lambda_dB = beam_.lambda_dB;
  slit = apply_gaussian_slit(std::move(slit), cfg_.slit2_width);
  WaveField bl = to_laser_.apply(slit, normalize);
  return to_screen_.apply(apply_laser_phase(std::move(bl), grating_), normalize);
}

double Chain::order_spacing() const {
  return beam_.lambda_dB * cfg_.dist_laser_screen / (0.5 * cfg_.laser_wavelength);
}

WaveField run_chain(const ExperimentConfig& cfg, double chi, const BeamState& beam_after_loss) {
  return Chain(cfg, beam_after_loss).at_screen(chi);
}

}  // namespace kdsim
