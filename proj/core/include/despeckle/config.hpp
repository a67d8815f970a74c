#pragma once

#include "despeckle/pipeline.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace despeckle {

/// Parses an INI-style run configuration. Every key is optional and falls back
/// to the default listed in default_config_text(); unknown sections or keys are
/// errors. Relative paths resolve against `base_dir`.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Commented configuration listing every key with its default value.
std::string default_config_text();

/// "5,10,20", "1-10" or "5-50:5".
std::vector<int> parse_int_list(std::string_view text);

/// "dx,dy,deg" with the angle given in degrees.
Jitter parse_jitter(std::string_view text);

}  // namespace despeckle
