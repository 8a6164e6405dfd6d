#include "kdsim/config_io.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

struct Field {
  std::string key;
  Getter get;
  Setter set;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size())
    throw ConfigError(std::string(key) + ": expected a number, got \"" + t + "\"");
  return v;
}

long long parse_int(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size())
    throw ConfigError(std::string(key) + ": expected an integer, got \"" + t + "\"");
  return v;
}

std::size_t parse_count(std::string_view key, std::string_view text) {
  const long long v = parse_int(key, text);
  if (v < 0) throw ConfigError(std::string(key) + ": must be nonnegative");
  return static_cast<std::size_t>(v);
}

template <class Ref>
Field real(std::string key, Ref ref) {
  Getter g = [ref](const ExperimentConfig& c) { return fmt(ref(c)); };
  Setter s = [ref, key](ExperimentConfig& c, std::string_view v) { ref(c) = parse_double(key, v); };
  return {std::move(key), std::move(g), std::move(s)};
}

template <class Ref>
Field count(std::string key, Ref ref) {
  Getter g = [ref](const ExperimentConfig& c) { return std::to_string(ref(c)); };
  Setter s = [ref, key](ExperimentConfig& c, std::string_view v) {
    ref(c) = static_cast<std::size_t>(parse_count(key, v));
  };
  return {std::move(key), std::move(g), std::move(s)};
}

template <class Ref>
Field integer(std::string key, Ref ref) {
  Getter g = [ref](const ExperimentConfig& c) { return std::to_string(ref(c)); };
  Setter s = [ref, key](ExperimentConfig& c, std::string_view v) {
    const long long x = parse_int(key, v);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      throw ConfigError(key + ": out of range");
    ref(c) = static_cast<int>(x);
  };
  return {std::move(key), std::move(g), std::move(s)};
}

// Optional length: a keyword stands for "absent".
template <class Ref>
Field optional_real(std::string key, Ref ref, std::string none_word, std::vector<std::string> accepted) {
  Getter g = [ref, none_word](const ExperimentConfig& c) {
    const auto& o = ref(c);
    return o ? fmt(*o) : none_word;
  };
  Setter s = [ref, key, accepted](ExperimentConfig& c, std::string_view v) {
    const std::string t = trim(v);
    for (const auto& w : accepted)
      if (t == w) {
        ref(c).reset();
        return;
      }
    ref(c) = parse_double(key, t);
  };
  return {std::move(key), std::move(g), std::move(s)};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(real("beam.energy_ev", [](auto& c) -> auto& { return c.beam_energy_ev; }));
    f.push_back(real("source.slit1_width_m", [](auto& c) -> auto& { return c.slit1_width; }));
    f.push_back({"source.width_convention",
                 [](const C& c) { return std::string(c.slit1_convention == WidthConvention::fwhm ? "fwhm" : "sigma"); },
                 [](C& c, std::string_view v) {
                   const std::string t = trim(v);
                   if (t == "fwhm") c.slit1_convention = WidthConvention::fwhm;
                   else if (t == "sigma") c.slit1_convention = WidthConvention::sigma;
                   else throw ConfigError("source.width_convention: expected fwhm or sigma, got \"" + t + "\"");
                 }});
    f.push_back(real("source.dist_to_slit2_m", [](auto& c) -> auto& { return c.dist_source_slit2; }));
    f.push_back(real("slit2.width_m", [](auto& c) -> auto& { return c.slit2_width; }));
    f.push_back(real("slit2.dist_to_plate_m", [](auto& c) -> auto& { return c.dist_slit2_plate; }));
    f.push_back(optional_real("plate.height_m", [](auto& c) -> auto& { return c.plate_height; },
                              "none", {"none", "inf", "infinity"}));
    f.push_back(real("plate.length_m", [](auto& c) -> auto& { return c.plate_length; }));
    f.push_back(real("plate.resistivity_ohm_m", [](auto& c) -> auto& { return c.resistivity; }));
    f.push_back(real("plate.temperature_k", [](auto& c) -> auto& { return c.temperature; }));
    f.push_back(real("plate.dist_to_laser_m", [](auto& c) -> auto& { return c.dist_plate_laser; }));
    f.push_back(real("laser.wavelength_m", [](auto& c) -> auto& { return c.laser_wavelength; }));
    f.push_back(real("laser.waist_m", [](auto& c) -> auto& { return c.laser_waist; }));
    f.push_back(real("laser.intensity_w_m2", [](auto& c) -> auto& { return c.laser_intensity; }));
    f.push_back(real("laser.offset_m", [](auto& c) -> auto& { return c.laser_offset; }));
    f.push_back(real("laser.dist_to_screen_m", [](auto& c) -> auto& { return c.dist_laser_screen; }));
    f.push_back(real("detector.sigma_m", [](auto& c) -> auto& { return c.detection_sigma; }));

    f.push_back(real("grid.source_window_m", [](auto& c) -> auto& { return c.grid.source.window; }));
    f.push_back(count("grid.source_samples", [](auto& c) -> auto& { return c.grid.source.samples; }));
    f.push_back(real("grid.slit_window_m", [](auto& c) -> auto& { return c.grid.slit.window; }));
    f.push_back(count("grid.slit_samples", [](auto& c) -> auto& { return c.grid.slit.samples; }));
    f.push_back(real("grid.laser_window_m", [](auto& c) -> auto& { return c.grid.laser.window; }));
    f.push_back(count("grid.laser_samples", [](auto& c) -> auto& { return c.grid.laser.samples; }));
    f.push_back(real("grid.screen_window_m", [](auto& c) -> auto& { return c.grid.screen.window; }));
    f.push_back(count("grid.screen_samples", [](auto& c) -> auto& { return c.grid.screen.samples; }));
    f.push_back(count("grid.source_points", [](auto& c) -> auto& { return c.grid.source_points; }));
    f.push_back(real("grid.source_node_spacing_m", [](auto& c) -> auto& { return c.grid.source_node_spacing; }));
    f.push_back(real("grid.source_span_sigmas", [](auto& c) -> auto& { return c.grid.source_span_sigmas; }));
    f.push_back({"grid.source_rule",
                 [](const C& c) { return std::string(c.grid.source_rule == SourceRule::uniform ? "uniform" : "gauss_hermite"); },
                 [](C& c, std::string_view v) {
                   const std::string t = trim(v);
                   if (t == "uniform") c.grid.source_rule = SourceRule::uniform;
                   else if (t == "gauss_hermite") c.grid.source_rule = SourceRule::gauss_hermite;
                   else throw ConfigError("grid.source_rule: expected uniform or gauss_hermite, got \"" + t + "\"");
                 }});
    f.push_back({"grid.method",
                 [](const C& c) { return std::string(c.grid.method == PropagationMethod::exact ? "exact" : "fresnel"); },
                 [](C& c, std::string_view v) {
                   const std::string t = trim(v);
                   if (t == "exact") c.grid.method = PropagationMethod::exact;
                   else if (t == "fresnel") c.grid.method = PropagationMethod::fresnel;
                   else throw ConfigError("grid.method: expected exact or fresnel, got \"" + t + "\"");
                 }});

    f.push_back(real("analysis.reference_separation_m", [](auto& c) -> auto& { return c.analysis.reference_separation; }));
    f.push_back(integer("analysis.contrast_max_order", [](auto& c) -> auto& { return c.analysis.contrast_max_order; }));
    f.push_back(real("analysis.peak_prominence", [](auto& c) -> auto& { return c.analysis.peak_prominence; }));
    f.push_back(integer("analysis.shift_order", [](auto& c) -> auto& { return c.analysis.shift_order; }));
    f.push_back(optional_real("analysis.calibration_separation_m",
                              [](auto& c) -> auto& { return c.analysis.calibration_separation; },
                              "auto", {"auto"}));
    f.push_back(real("analysis.density_half_width_m", [](auto& c) -> auto& { return c.analysis.density_half_width; }));
    f.push_back(count("analysis.density_max_points", [](auto& c) -> auto& { return c.analysis.density_max_points; }));
    return f;
  }();
  return table;
}

const Field& field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw ConfigError(std::string(key) + ": unknown configuration key");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  ExperimentConfig trial = cfg;
  field(key).set(trial, value);
  validate(trial);
  cfg = trial;
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) { return field(key).get(cfg); }

RunConfig parse_config(std::istream& is, std::string_view source_name) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << source_name << ":" << e.line() << ": " << e.message();
    throw ConfigError(msg.str());
  }

  RunConfig rc;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section + ": key outside any section");
    for (const auto& [name, node] : body) {
      if (!node.empty()) throw ConfigError(section + "." + name + ": nested keys are not supported");
      const std::string value = node.get_value<std::string>();
      if (section == "run") {
        if (name != "id") throw ConfigError("run." + name + ": unknown configuration key");
        rc.run_id = trim(value);
        continue;
      }
      field(section + "." + name).set(rc.experiment, value);
    }
  }
  validate(rc.experiment);
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  return parse_config(in, path.string());
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string current;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string section = f.key.substr(0, dot);
    if (section != current) {
      if (!current.empty()) os << '\n';
      os << '[' << section << "]\n";
      current = section;
    }
    os << f.key.substr(dot + 1) << " = " << f.get(cfg) << '\n';
  }
  return os.str();
}

std::string config_digest(const ExperimentConfig& cfg) {
  const std::string text = canonical_config(cfg);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("config_digest: SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

}  // namespace kdsim
