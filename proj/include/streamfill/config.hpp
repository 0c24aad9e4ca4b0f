#pragma once

// Flat "key = value" configuration text. '#' starts a comment; blank lines are
// ignored; keys outside the allowed set are rejected.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace streamfill {

using FlatConfig = std::map<std::string, std::string>;

/// Throws ConfigError on malformed lines, duplicate keys, or unknown keys.
FlatConfig parse_flat_config(std::string_view text, const std::set<std::string>& allowed);
FlatConfig read_flat_config(const std::filesystem::path& path, const std::set<std::string>& allowed);

// Typed lookups; ConfigError names the key when the value does not parse.
long long config_int(const FlatConfig& cfg, const std::string& key, long long fallback);
bool config_bool(const FlatConfig& cfg, const std::string& key, bool fallback);
std::string config_string(const FlatConfig& cfg, const std::string& key, const std::string& fallback);

} // namespace streamfill
