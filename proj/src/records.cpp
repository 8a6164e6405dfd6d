#include "kdsim/records.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <ostream>

#include "kdsim/config_io.hpp"

namespace kdsim {

namespace {

// Non-finite values print as nan/inf, which CSV readers accept.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json json_num(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

}  // namespace

void write_report_csv(std::ostream& os, const wall::DecoherenceReport& r) {
  os << "quantity,value,unit\n";
  os << "delta_x_ref," << num(r.delta_x_ref) << ",m\n";
  os << "flight_time," << num(r.t_f) << ",s\n";
  os << "tau_dec," << num(r.tau_dec) << ",s\n";
  os << "overlap_correction," << num(r.C) << ",1\n";
  os << "r_dec," << num(r.R_dec) << ",1\n";
  os << "r_dec_from_energy," << num(r.R_dec_from_energy) << ",1\n";
  os << "power_loss," << num(r.P) << ",W\n";
  os << "delta_e," << num(r.delta_E) << ",J\n";
  os << "delta_e_ev," << num(r.delta_E_ev()) << ",eV\n";
  os << "coherence_length," << (r.x_coh ? num(*r.x_coh) : "inf") << ",m\n";
  os << "thermal_wavelength," << num(r.lambda_th) << ",m\n";
  os << "lambda_db_after_loss," << num(r.beam_after_loss.lambda_dB) << ",m\n";
  os << "velocity_after_loss," << num(r.beam_after_loss.velocity) << ",m/s\n";
}

void write_metrics_header(std::ostream& os) {
  os << "run_id,h_p_m,intensity_w_m2,w1_m,delta_e_ev,r_dec,contrast,peak13_shift_rel\n";
}

void write_metrics_row(std::ostream& os, const RunResult& r) {
  const auto& c = r.config;
  os << r.run_id << ',' << (c.plate_height ? num(*c.plate_height) : "inf") << ',' << num(c.laser_intensity) << ','
     << num(c.slit1_width) << ',' << num(r.report.delta_E_ev()) << ',' << num(r.report.R_dec) << ','
     << num(r.contrast) << ',' << num(r.shift) << '\n';
}

void write_peaks_csv(std::ostream& os, const PeakSet& peaks) {
  os << "order,position_m,height_per_m\n";
  for (std::size_t i = 0; i < peaks.size(); ++i)
    os << peaks.orders[i] << ',' << num(peaks.positions[i]) << ',' << num(peaks.heights[i]) << '\n';
}

void write_manifest(std::ostream& os, const Manifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["kernel_isa"] = m.kernel_isa;
  j["threads"] = m.threads;
  j["files"] = m.files;
  for (const auto& [k, v] : m.extra) j["results"][k] = v;
  j["runs"] = nlohmann::json::array();
  for (const RunResult* r : m.runs) {
    nlohmann::json jr;
    jr["run_id"] = r->run_id;
    jr["config_sha256"] = r->digest;
    jr["config"] = canonical_config(r->config);
    jr["source_nodes"] = r->source_nodes;
    jr["delta_e_ev"] = json_num(r->report.delta_E_ev());
    jr["r_dec"] = json_num(r->report.R_dec);
    jr["contrast"] = json_num(r->contrast);
    jr["peak_shift_rel"] = json_num(r->shift);
    jr["orders_resolved"] = r->peaks.resolved_orders();
    jr["warnings"] = r->warnings;
    jr["timings_s"] = {{"setup", r->timings.setup_s},
                       {"source_sum", r->timings.sum_s},
                       {"analysis", r->timings.analysis_s},
                       {"total", r->timings.total_s}};
    j["runs"].push_back(std::move(jr));
  }
  os << j.dump(2) << '\n';
}

void write_pattern_svg(std::ostream& os, const DiffractionPattern& p, const std::string& title, bool log_scale) {
  constexpr double W = 800, H = 400, L = 60, R = 20, T = 30, B = 40;
  const double pmax = p.max();
  const double floor = pmax > 0.0 ? pmax * 1e-6 : 1.0;
  auto yval = [&](double d) { return log_scale ? std::log10(std::max(d, floor)) : d; };
  const double y0 = log_scale ? std::log10(floor) : 0.0;
  const double y1 = log_scale ? std::log10(std::max(pmax, floor)) : std::max(pmax, 1e-300);
  const double x0 = p.size() ? p.x(0) : 0.0, x1 = p.size() ? p.x(p.size() - 1) : 1.0;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\" font-size=\"12\">position ("
     << num(x0 * 1e6) << " to " << num(x1 * 1e6) << " um)</text>\n";
  os << "<text x=\"15\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 " << H / 2
     << ")\" text-anchor=\"middle\">" << (log_scale ? "log10 density (1/m)" : "density (1/m)") << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"";
  // At most ~2 points per pixel column.
  const std::size_t stride = std::max<std::size_t>(1, p.size() / static_cast<std::size_t>(2 * (W - L - R)));
  for (std::size_t i = 0; i < p.size(); i += stride) {
    const double px = L + (p.x(i) - x0) / (x1 - x0) * (W - L - R);
    const double py = H - B - (yval(p.density[i]) - y0) / (y1 - y0) * (H - T - B);
    os << px << ',' << py << ' ';
  }
  os << "\"/>\n</svg>\n";
}

}  // namespace kdsim
