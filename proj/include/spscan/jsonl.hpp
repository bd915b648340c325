#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spscan/common.hpp"

namespace spscan {

using json = nlohmann::json;

// Streams records line by line; parse errors carry file and line number.
inline void for_each_jsonl(const std::filesystem::path& path,
                           const std::function<void(const json&, size_t line_no)>& fn) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            fail(path.string() + ":" + std::to_string(line_no) + ": malformed json: " + e.what());
        }
        try {
            fn(j, line_no);
        } catch (const error&) {
            throw;
        } catch (const std::exception& e) {
            fail(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

template <typename Record>
std::vector<Record> load_jsonl(const std::filesystem::path& path) {
    std::vector<Record> out;
    for_each_jsonl(path, [&](const json& j, size_t) { out.push_back(j.get<Record>()); });
    return out;
}

// Writes to a sibling temp file and renames into place, so consumers never
// observe a partially written output and reruns are idempotent.
class atomic_writer {
public:
    explicit atomic_writer(const std::filesystem::path& path)
        : final_path_(path), tmp_path_(path.string() + ".tmp") {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(tmp_path_, std::ios::trunc);
        if (!out_) fail("cannot open " + tmp_path_.string() + " for writing");
    }

    std::ofstream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_) fail("write failed for " + tmp_path_.string());
        out_.close();
        std::filesystem::rename(tmp_path_, final_path_);
        committed_ = true;
    }

    ~atomic_writer() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_path_, ec);
        }
    }

private:
    std::filesystem::path final_path_;
    std::filesystem::path tmp_path_;
    std::ofstream out_;
    bool committed_ = false;
};

template <typename Record>
void save_jsonl(const std::filesystem::path& path, const std::vector<Record>& records) {
    atomic_writer w(path);
    for (const Record& r : records) {
        json j = r;
        w.stream() << j.dump() << "\n";
    }
    w.commit();
}

inline void save_json(const std::filesystem::path& path, const json& j) {
    atomic_writer w(path);
    w.stream() << j.dump(2) << "\n";
    w.commit();
}

inline json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        fail(path.string() + ": malformed json: " + e.what());
    }
}

// Field accessors that name the missing or mistyped key in the error.
template <typename T>
T require_field(const json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        fail(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        fail(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace spscan
