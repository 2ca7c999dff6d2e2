#pragma once

#include <string>
#include <vector>

#include "icasim/harness.hpp"

namespace icasim::config {

/// Parse a plain-text key=value experiment configuration (see README for the
/// grammar) into a plan. `overrides` are extra "key=value" entries applied
/// after the file. Unknown keys, malformed values and semantic violations
/// throw ConfigError with the offending line or key.
harness::ExperimentPlan parse_config_text(const std::string& text,
                                          const std::vector<std::string>& overrides = {});

/// Same, reading from a file. A missing file is a ConfigError; an empty file
/// yields the full default plan.
harness::ExperimentPlan parse_config_file(const std::string& path,
                                          const std::vector<std::string>& overrides = {});

}  // namespace icasim::config
