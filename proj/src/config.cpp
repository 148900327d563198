#include "lar/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lar/error.hpp"

namespace lar {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::pair<std::string, std::string> split_assignment(std::string_view line, bool& ok) {
    const auto eq = line.find('=');
    ok = eq != std::string_view::npos;
    if (!ok) return {};
    std::string key = trim(line.substr(0, eq));
    ok = !key.empty();
    return {std::move(key), trim(line.substr(eq + 1))};
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorCode::Parse, "config key '" + key + "': cannot parse '" + text + "'");
    }
    return value;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
    KeyValueConfig cfg;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        bool ok = false;
        auto [key, value] = split_assignment(body, ok);
        if (!ok) {
            throw Error(ErrorCode::Parse, source + ":" + std::to_string(number) + ": expected 'key = value', got '" +
                                              body + "'");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
    return parse(in, path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }
void KeyValueConfig::set(const std::string& key, double value) { entries_[key] = format_double(value); }
void KeyValueConfig::set(const std::string& key, long long value) { entries_[key] = std::to_string(value); }
void KeyValueConfig::set(const std::string& key, std::uint64_t value) { entries_[key] = std::to_string(value); }
void KeyValueConfig::set(const std::string& key, bool value) { entries_[key] = value ? "true" : "false"; }

void KeyValueConfig::apply_overrides(std::span<const std::string> assignments) {
    for (const std::string& a : assignments) {
        bool ok = false;
        auto [key, value] = split_assignment(a, ok);
        if (!ok) throw Error(ErrorCode::Usage, "override '" + a + "' is not of the form key=value");
        entries_[key] = value;
    }
}

void KeyValueConfig::merge(const KeyValueConfig& other) {
    for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : parse_number<double>(key, it->second);
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : parse_number<long long>(key, it->second);
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::Parse, "config key '" + key + "': expected a boolean, got '" + v + "'");
}

void KeyValueConfig::require_known(std::span<const std::string_view> known) const {
    for (const auto& [k, v] : entries_) {
        if (std::find(known.begin(), known.end(), k) == known.end()) {
            throw Error(ErrorCode::Usage, "unknown config key '" + k + "'");
        }
    }
}

std::string KeyValueConfig::serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
    return out.str();
}

void KeyValueConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << serialize();
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace lar
