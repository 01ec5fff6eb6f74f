#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace firerisk {

// User/config mistakes: bad paths, malformed config, schema mismatch. CLI exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data that violates a documented contract: bad joins, singular fits, shape mismatch. CLI exit 1.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Shortest round-trip formatting so persisted tables are byte-stable across reruns.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw DataError("number formatting failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, bool* ok = nullptr) {
    std::string t = trim(s);
    if (t.empty()) {
        if (ok) *ok = true;
        return kMissing;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    bool good = ec == std::errc() && ptr == t.data() + t.size();
    if (ok) {
        *ok = good;
        return good ? v : kMissing;
    }
    if (!good) throw DataError("cannot parse number: '" + t + "'");
    return v;
}

inline long parse_long(std::string_view s, bool* ok = nullptr) {
    std::string t = trim(s);
    long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    bool good = !t.empty() && ec == std::errc() && ptr == t.data() + t.size();
    if (ok) {
        *ok = good;
        return good ? v : 0;
    }
    if (!good) throw DataError("cannot parse integer: '" + t + "'");
    return v;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
}

} // namespace firerisk
