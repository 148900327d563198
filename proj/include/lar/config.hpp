#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace lar {

/// Flat `key = value` configuration. Blank lines and `#` comments are ignored.
/// Serialization is sorted by key so equal configs produce identical bytes.
class KeyValueConfig {
public:
    /// Throws Parse naming `source` and the 1-based line of the first bad line.
    static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
    /// Throws Io if the file cannot be opened.
    static KeyValueConfig load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
    void set(const std::string& key, std::uint64_t value);
    void set(const std::string& key, bool value);

    /// Applies "key=value" overrides on top of this config.
    void apply_overrides(std::span<const std::string> assignments);
    void merge(const KeyValueConfig& other);

    bool has(const std::string& key) const { return entries_.contains(key); }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Throws Usage naming the first key not in `known`.
    void require_known(std::span<const std::string_view> known) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    std::string serialize() const;
    void save(const std::filesystem::path& path) const;

private:
    std::map<std::string, std::string> entries_;
};

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace lar
