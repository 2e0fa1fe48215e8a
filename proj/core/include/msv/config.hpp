#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>

#include "msv/calibration.hpp"
#include "msv/mc_oracle.hpp"
#include "msv/model.hpp"
#include "msv/quotes.hpp"

namespace msv {

/// Everything a run can be configured with. Defaults match the library defaults.
struct AppConfig {
  ModelParams model{};
  QuadratureConfig quad{};
  CalibrationConfig calib{};
  McConfig mc{};
  double mc_nu = 0.2166;  ///< fast-factor vol of vol for Monte Carlo runs
  FilterRules filter{};
  CsvSchema schema{};
  std::size_t threads = 0;  ///< 0: hardware concurrency
};

/// Flat "key = value" file; '#' starts a comment.
[[nodiscard]] std::map<std::string, std::string> parse_key_values(std::istream& in);
[[nodiscard]] std::map<std::string, std::string> load_key_values(const std::string& path);

/// Applies entries onto `cfg`. Throws ConfigError on an unknown key or a
/// value that does not parse.
void apply_key_values(AppConfig& cfg, const std::map<std::string, std::string>& entries);
void apply_key_value(AppConfig& cfg, const std::string& key, const std::string& value);

/// Every key with its current value and a one-line description.
void write_config_reference(std::ostream& os, const AppConfig& cfg = {});

}  // namespace msv
