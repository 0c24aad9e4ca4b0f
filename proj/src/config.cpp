#include "streamfill/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "streamfill/errors.hpp"

namespace streamfill {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

FlatConfig parse_flat_config(std::string_view text, const std::set<std::string>& allowed) {
    FlatConfig out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "config line " + std::to_string(line_no);
        if (eq == std::string_view::npos) throw_config(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw_config(where + ": empty key");
        if (!allowed.count(key)) throw_config(where + ": unknown key '" + key + "'");
        if (!out.emplace(key, value).second) throw_config(where + ": duplicate key '" + key + "'");
    }
    return out;
}

FlatConfig read_flat_config(const std::filesystem::path& path, const std::set<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw_config("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_flat_config(ss.str(), allowed);
}

long long config_int(const FlatConfig& cfg, const std::string& key, long long fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    const std::string& v = it->second;
    long long out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size()) {
        throw_config("config key '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

bool config_bool(const FlatConfig& cfg, const std::string& key, bool fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw_config("config key '" + key + "' expects on/off, got '" + v + "'");
}

std::string config_string(const FlatConfig& cfg, const std::string& key, const std::string& fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

} // namespace streamfill
