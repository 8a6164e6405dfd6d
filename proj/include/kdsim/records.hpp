#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kdsim/coherence.hpp"
#include "kdsim/pattern.hpp"
#include "kdsim/simulation.hpp"
#include "kdsim/wall.hpp"

namespace kdsim {

/// quantity,value,unit rows.
void write_report_csv(std::ostream& os, const wall::DecoherenceReport& r);

/// run_id,h_p_m,intensity_w_m2,w1_m,delta_e_ev,r_dec,contrast,peak13_shift_rel
void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const RunResult& r);

/// order,position_m,height_per_m rows.
void write_peaks_csv(std::ostream& os, const PeakSet& peaks);

/// Provenance of one output directory.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  std::string kernel_isa;
  int threads = 1;
  std::vector<const RunResult*> runs;
  std::vector<std::string> files;
  std::map<std::string, std::string> extra;  // command-specific results
};

void write_manifest(std::ostream& os, const Manifest& m);

/// Line plot of a pattern as a standalone SVG document.
void write_pattern_svg(std::ostream& os, const DiffractionPattern& p, const std::string& title, bool log_scale);

}  // namespace kdsim
