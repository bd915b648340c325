#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spscan/common.hpp"

namespace spscan {

// Flat TOML-style config: `key = value` lines, optional [section] headers
// (flattened to "section.key"), # comments, scalar and array values.
// Covers the config surface of this project without a full TOML dependency.
class kv_config {
public:
    static kv_config parse_text(const std::string& text, const std::string& origin = "<string>");
    static kv_config parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    int64_t get_int(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback) const;

    void set(const std::string& key, const std::string& raw) { values_[key] = {raw, false}; }
    const std::map<std::string, std::pair<std::string, bool>>& entries() const { return values_; }

private:
    // value -> (raw text, is_array)
    std::map<std::string, std::pair<std::string, bool>> values_;
    std::string origin_;

    const std::string& raw(const std::string& key) const;
};

// Every run writes a manifest next to its output: invoked subcommand, seed,
// resolved options, input digests. Key order is insertion order.
class manifest {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, int64_t value);
    void add(const std::string& key, double value);
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

uint64_t file_digest(const std::filesystem::path& path);

}  // namespace spscan
