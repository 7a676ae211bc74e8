#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "viskv/errors.hpp"

namespace viskv {

/// Shortest round-trip decimal form of a double (std::to_chars), so emitted
/// CSV is byte-deterministic and parses back to the identical value.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/// CSV assembly with a provenance header: commented key=value lines covering
/// every effective parameter plus a hash of the canonical parameter list.
/// No clocks, no hostnames; identical configs produce identical bytes.
class CsvBuilder {
  public:
    explicit CsvBuilder(std::string scenario, const std::map<std::string, std::string>& params) {
        body_ += "# viskv scenario=" + scenario + "\n";
        std::string canonical;
        for (const auto& [k, v] : params) canonical += k + "=" + v + "\n";
        body_ += "# config_hash=" + hex64(fnv1a64(scenario + "\n" + canonical)) + "\n";
        for (const auto& [k, v] : params) body_ += "# " + k + "=" + v + "\n";
    }

    void columns(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) body_ += ',';
            body_ += names[i];
        }
        body_ += '\n';
    }

    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) body_ += ',';
            body_ += format_double(vals[i]);
        }
        body_ += '\n';
    }

    void comment(const std::string& line) { body_ += "# " + line + "\n"; }
    void raw(const std::string& s) { body_ += s; }

    const std::string& str() const { return body_; }

  private:
    std::string body_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("failed to write output file: " + path);
}

} // namespace viskv
