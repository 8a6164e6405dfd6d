#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kdsim/params.hpp"

namespace kdsim {

/// A configuration file: the experiment plus an optional run label ([run] id).
struct RunConfig {
  ExperimentConfig experiment;
  std::string run_id;  // empty: callers derive one from the digest
};

/// INI schema. Every key is optional and defaults to the built-in values;
/// unknown sections or keys, malformed numbers and out-of-range values raise
/// ConfigError naming "section.key". Lengths are in metres, as the key
/// suffixes say. plate.height_m accepts "none" or "inf" for no plate.
RunConfig parse_config(std::istream& is, std::string_view source_name = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Sets one "section.key" from text, with the same checks as parsing
/// (the whole config is re-validated).
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Text of "section.key" in canonical form.
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);

/// Every key, in canonical order.
std::vector<std::string> config_keys();

/// INI text with every key in fixed order and round-trip number formatting.
std::string canonical_config(const ExperimentConfig& cfg);

/// Lower-case hex SHA-256 of canonical_config.
std::string config_digest(const ExperimentConfig& cfg);

}  // namespace kdsim
