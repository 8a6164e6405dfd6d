#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string l;
  std::getline(is, l);
  return l;
}

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / ("kdsim_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

  Outcome run(const std::string& args, const std::string& env = "") const {
    const fs::path o = dir_ / "stdout.txt", e = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" KDSIM_CLI_PATH "' " + args + " > '" +
                            o.string() + "' 2> '" + e.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
  }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  bool has_partial() const {
    for (const auto& e : fs::directory_iterator(dir_))
      if (e.path().filename().string().find(".partial-") != std::string::npos) return true;
    return false;
  }

 private:
  fs::path dir_;
};

const std::string kConfigs = KDSIM_CONFIG_DIR;

}  // namespace

TEST_CASE("simulate writes the run directory") {
  Sandbox sb;
  const Outcome r = sb.run("simulate '" + kConfigs + "/low_no_plate.ini' --out run1 --plot");
  REQUIRE(r.code == 0);
  const fs::path d = sb.dir() / "run1";
  CHECK(first_line(d / "pattern.csv") == "position_m,density_per_m");
  CHECK(first_line(d / "peaks.csv") == "order,position_m,height_per_m");
  CHECK(first_line(d / "report.csv") == "quantity,value,unit");
  CHECK(first_line(d / "metrics.csv") ==
        "run_id,h_p_m,intensity_w_m2,w1_m,delta_e_ev,r_dec,contrast,peak13_shift_rel");
  CHECK(fs::exists(d / "manifest.json"));
  const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(m.at("command") == "simulate");
  CHECK(m.at("runs").size() == 1);
  bool svg = false;
  for (const auto& e : fs::directory_iterator(d)) svg = svg || e.path().extension() == ".svg";
  CHECK(svg);
  CHECK_FALSE(sb.has_partial());

  // Rerunning into an existing run directory replaces it.
  CHECK(sb.run("simulate '" + kConfigs + "/low_no_plate.ini' --out run1").code == 0);
  // A directory that is not ours is left alone.
  fs::create_directories(sb.dir() / "mine");
  std::ofstream(sb.dir() / "mine" / "keep.txt") << "x";
  CHECK(sb.run("simulate '" + kConfigs + "/low_no_plate.ini' --out mine").code != 0);
  CHECK(fs::exists(sb.dir() / "mine" / "keep.txt"));
}

TEST_CASE("configuration errors exit with 2 and name the field") {
  Sandbox sb;
  const fs::path bad = sb.write("bad.ini", "[beam]\nenergy_ev = -5\n");
  const Outcome r = sb.run("simulate '" + bad.string() + "' --out nope");
  CHECK(r.code == 2);
  CHECK(r.err.find("beam.energy_ev") != std::string::npos);
  CHECK_FALSE(fs::exists(sb.dir() / "nope"));

  const fs::path typo = sb.write("typo.ini", "[plate]\nhieght_m = 1e-6\n");
  const Outcome t = sb.run("simulate '" + typo.string() + "'");
  CHECK(t.code == 2);
  CHECK(t.err.find("plate.hieght_m") != std::string::npos);
}

TEST_CASE("invalid runs exit with 3 and leave nothing behind") {
  Sandbox sb;
  const fs::path cfg = sb.write("thin.ini", "[plate]\nheight_m = 0.4e-6\n");
  const Outcome r = sb.run("simulate '" + cfg.string() + "' --out gone");
  CHECK(r.code == 3);
  CHECK_FALSE(fs::exists(sb.dir() / "gone"));
  CHECK_FALSE(sb.has_partial());
}

TEST_CASE("sweep writes one metrics row per value") {
  Sandbox sb;
  const Outcome r =
      sb.run("sweep '" + kConfigs + "/low_no_plate.ini' --axis h_p --values inf,3e-6,2e-6 --out sw --threads 1");
  REQUIRE(r.code == 0);
  const std::string metrics = slurp(sb.dir() / "sw" / "metrics.csv");
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 4);
  CHECK(sb.run("sweep '" + kConfigs + "/low_no_plate.ini' --axis bogus --values 1").code != 0);
}

TEST_CASE("verify passes and reports sampling problems") {
  Sandbox sb;
  const Outcome ok = sb.run("verify");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS energy_loss") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  const Outcome bad = sb.run("verify", "KDSIM_VERIFY_SAMPLES=64");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL gaussian_waist_fresnel") != std::string::npos);
  CHECK(bad.out.find("need at least") != std::string::npos);
}

TEST_CASE("usage errors") {
  Sandbox sb;
  CHECK(sb.run("").code != 0);
  CHECK(sb.run("simulate /nonexistent.ini").code != 0);
  CHECK(sb.run("calibrate '" + kConfigs + "/low_no_plate.ini' --target-r -1").code != 0);
}
