#ifndef SDLAB_CONFIG_HPP
#define SDLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdlab {

/// INI-style key-value configuration: `[section]` headers, `key = value`
/// lines, `#`/`;` full-line comments. Keys are addressed as "section.key".
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback = {}) const;
    std::string require(const std::string& key) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    double real(const std::string& key, double fallback) const;
    bool boolean(const std::string& key, bool fallback) const;
    /// Comma-separated list; empty when the key is absent.
    std::vector<std::string> list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);

    /// Sorted "key = value" lines; input to the config hash.
    std::string canonical_text() const;
    /// FNV-1a 64-bit over the canonical text, as fixed-width hex.
    std::string hash() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace sdlab

#endif
