// kdsim: Kapitza-Dirac diffraction with wall decoherence and dissipation.

#include <omp.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "kdsim/coherence.hpp"
#include "kdsim/config_io.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/records.hpp"
#include "kdsim/simd/kernels.hpp"
#include "kdsim/simulation.hpp"
#include "kdsim/verify.hpp"

namespace fs = std::filesystem;
using namespace kdsim;

namespace {

const std::map<std::string, std::string> kAxes = {{"h_p", "plate.height_m"},
                                                  {"intensity", "laser.intensity_w_m2"},
                                                  {"resistivity", "plate.resistivity_ohm_m"},
                                                  {"w1", "source.slit1_width_m"}};

struct Common {
  std::string out;
  int threads = 0;
  bool plot = false;
  bool log_plot = false;
};

// Outputs are assembled in a sibling staging directory and moved into place
// only when complete, so a failed run leaves nothing behind.
class Staging {
 public:
  explicit Staging(fs::path target) : target_(std::move(target)) {
    if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
    staging_ = target_;
    staging_ += ".partial-" + std::to_string(::getpid());
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  ~Staging() {
    std::error_code ec;
    if (!committed_) fs::remove_all(staging_, ec);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    const fs::path p = staging_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
  }
  const std::vector<std::string>& files() const { return files_; }

  void commit() {
    if (fs::exists(target_)) {
      // Only ever replace a directory this tool produced.
      if (!fs::is_directory(target_) || !fs::exists(target_ / "manifest.json"))
        throw std::runtime_error(target_.string() + " exists and is not a previous kdsim output; refusing to replace it");
      fs::remove_all(target_);
    }
    fs::rename(staging_, target_);
    committed_ = true;
  }

 private:
  fs::path target_, staging_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

void add_common(CLI::App* app, Common& c, bool with_plot) {
  app->add_option("--out", c.out, "Output directory (default: named by the config hash)");
  app->add_option("--threads", c.threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
  if (with_plot) {
    app->add_flag("--plot", c.plot, "Also write SVG plots of the patterns");
    app->add_flag("--log", c.log_plot, "Logarithmic density axis in plots");
  }
}

void apply_threads(const Common& c) {
  if (c.threads > 0) omp_set_num_threads(c.threads);
}

Manifest base_manifest(const std::string& command, int argc, char** argv) {
  Manifest m;
  m.command = command;
  m.argv.assign(argv, argv + argc);
  m.kernel_isa = std::string(simd::to_string(simd::active().isa));
  m.threads = omp_get_max_threads();
  return m;
}

std::string label(const RunConfig& rc, const ExperimentConfig& cfg) {
  return rc.run_id.empty() ? config_digest(cfg).substr(0, 12) : rc.run_id;
}

void print_run(const RunResult& r) {
  std::cout << r.run_id << ": dE = " << r.report.delta_E_ev() << " eV, R_dec = " << r.report.R_dec
            << ", contrast = " << r.contrast << ", order-" << r.config.analysis.shift_order
            << " shift = " << r.shift << ", orders resolved = " << r.peaks.resolved_orders() << ", "
            << r.source_nodes << " source nodes, " << r.timings.total_s << " s\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << r.run_id << ": " << w << '\n';
}

void emit_run(Staging& st, const RunResult& r, const std::string& suffix, const Common& c) {
  {
    auto os = st.open("pattern" + suffix + ".csv");
    write_pattern_csv(os, r.pattern);
  }
  {
    auto os = st.open("peaks" + suffix + ".csv");
    write_peaks_csv(os, r.peaks);
  }
  {
    auto os = st.open("report" + suffix + ".csv");
    write_report_csv(os, r.report);
  }
  if (c.plot) {
    auto os = st.open("pattern" + suffix + ".svg");
    write_pattern_svg(os, r.pattern, r.run_id, c.log_plot);
  }
}

int cmd_simulate(const std::string& path, const Common& c, int argc, char** argv) {
  apply_threads(c);
  const RunConfig rc = load_config(path);
  const ExperimentConfig& cfg = rc.experiment;
  const std::string id = label(rc, cfg);
  Staging st(c.out.empty() ? fs::path("runs") / config_digest(cfg).substr(0, 12) : fs::path(c.out));

  Simulator sim;
  const RunResult r = sim.run(cfg, id);
  print_run(r);

  emit_run(st, r, "", c);
  {
    auto os = st.open("metrics.csv");
    write_metrics_header(os);
    write_metrics_row(os, r);
  }
  Manifest m = base_manifest("simulate", argc, argv);
  m.runs.push_back(&r);
  m.files = st.files();
  m.files.push_back("manifest.json");
  {
    auto os = st.open("manifest.json");
    write_manifest(os, m);
  }
  st.commit();
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& axis, const std::vector<std::string>& values,
              const Common& c, int argc, char** argv) {
  apply_threads(c);
  const RunConfig rc = load_config(path);
  const std::string key = kAxes.at(axis);
  std::vector<ExperimentConfig> cfgs;
  for (const auto& v : values) {
    ExperimentConfig cfg = rc.experiment;
    set_config_value(cfg, key, v);
    cfgs.push_back(cfg);
  }
  const std::string base = label(rc, rc.experiment);
  Staging st(c.out.empty() ? fs::path("sweeps") / (config_digest(rc.experiment).substr(0, 12) + "-" + axis)
                           : fs::path(c.out));

  Simulator sim;
  std::vector<RunResult> results;
  results.reserve(cfgs.size());
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    results.push_back(sim.run(cfgs[i], base + "-" + axis + "=" + values[i]));
    print_run(results.back());
    emit_run(st, results.back(), "_" + std::to_string(i), c);
  }
  {
    auto os = st.open("metrics.csv");
    write_metrics_header(os);
    for (const auto& r : results) write_metrics_row(os, r);
  }
  Manifest m = base_manifest("sweep", argc, argv);
  m.extra["axis"] = key;
  for (const auto& r : results) m.runs.push_back(&r);
  m.files = st.files();
  m.files.push_back("manifest.json");
  {
    auto os = st.open("manifest.json");
    write_manifest(os, m);
  }
  st.commit();
  return 0;
}

int cmd_calibrate(const std::string& path, double target, const Common& c, int argc, char** argv) {
  apply_threads(c);
  const RunConfig rc = load_config(path);
  const ExperimentConfig& cfg = rc.experiment;
  Staging st(c.out.empty() ? fs::path("calibrations") / config_digest(cfg).substr(0, 12) : fs::path(c.out));

  const CalibrationResult res = calibrate_source_width(cfg, target);
  const DensityMatrixSlice rho0 = source_density_matrix(cfg, cfg.source_sigma());
  const DensityMatrixSlice rho1 = source_density_matrix(cfg, cfg.source_sigma(res.w1));
  const double ratio = coherence_ratio(rho1, rho0, res.separation);
  std::cout << "w1 = " << res.w1 << " m (target R = " << target << ", achieved R = " << res.achieved_R
            << ", coherence ratio = " << ratio << " at separation " << res.separation << " m, "
            << res.evaluations << " evaluations)\n";

  {
    auto os = st.open("calibration.csv");
    os.precision(10);
    os << "target_r,w1_m,achieved_r,coherence_ratio,separation_m,baseline_w1_m\n";
    os << target << ',' << res.w1 << ',' << res.achieved_R << ',' << ratio << ',' << res.separation << ','
       << cfg.slit1_width << '\n';
  }
  {
    auto os = st.open("antidiagonal_baseline.csv");
    write_antidiagonal_csv(os, antidiagonal_profile(rho0));
  }
  {
    auto os = st.open("antidiagonal_calibrated.csv");
    write_antidiagonal_csv(os, antidiagonal_profile(rho1));
  }
  Manifest m = base_manifest("calibrate", argc, argv);
  m.extra["config_sha256"] = config_digest(cfg);
  m.extra["target_r"] = std::to_string(target);
  m.extra["w1_m"] = std::to_string(res.w1);
  m.extra["achieved_r"] = std::to_string(res.achieved_R);
  m.files = st.files();
  m.files.push_back("manifest.json");
  {
    auto os = st.open("manifest.json");
    write_manifest(os, m);
  }
  st.commit();
  return 0;
}

int cmd_verify(const Common& c) {
  apply_threads(c);
  bool all = true;
  for (const auto& chk : run_verification()) {
    std::cout << (chk.passed ? "PASS " : "FAIL ") << chk.name << ": " << chk.detail << '\n';
    all = all && chk.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kapitza-Dirac electron diffraction with resistive-wall decoherence and dissipation"};
  app.require_subcommand(1);

  Common common;
  std::string cfg_path, axis;
  std::vector<std::string> values;
  double target_r = 0.0;

  auto* sim = app.add_subcommand("simulate", "Run one configuration");
  sim->add_option("config", cfg_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  add_common(sim, common, true);

  auto* sweep = app.add_subcommand("sweep", "Run a configuration over values of one parameter");
  sweep->add_option("config", cfg_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "Swept parameter")->required()->check(CLI::IsMember({"h_p", "intensity", "resistivity", "w1"}));
  sweep->add_option("--values", values, "Comma-separated values (SI units; h_p accepts inf)")
      ->required()
      ->delimiter(',');
  add_common(sweep, common, true);

  auto* cal = app.add_subcommand("calibrate", "Find the source width giving a decoherence amount");
  cal->add_option("config", cfg_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  cal->add_option("--target-r", target_r, "Target decoherence amount R")->required()->check(CLI::NonNegativeNumber);
  add_common(cal, common, false);

  auto* ver = app.add_subcommand("verify", "Run the built-in oracle checks");
  add_common(ver, common, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(cfg_path, common, argc, argv);
    if (*sweep) return cmd_sweep(cfg_path, axis, values, common, argc, argv);
    if (*cal) return cmd_calibrate(cfg_path, target_r, common, argc, argv);
    if (*ver) return cmd_verify(common);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidRunError& e) {
    std::cerr << "invalid run: " << e.what() << '\n';
    return 3;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
