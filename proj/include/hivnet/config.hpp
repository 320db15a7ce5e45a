#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hivnet/model_params.hpp"

namespace hivnet {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses a JSON config into ModelParams. Every key is optional; missing
/// values keep the case-study defaults, so an empty document reproduces the
/// default scenario. Unknown keys and out-of-range values raise ConfigError
/// naming the offending parameter; parse errors carry a line number.
/// p_steady is derived from the degree distribution unless the config pins it.
ModelParams load_config(std::istream& in);
ModelParams load_config_string(const std::string& text);
ModelParams load_config_file(const std::string& path);

}  // namespace hivnet
