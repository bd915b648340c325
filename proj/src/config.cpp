#include "spscan/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "spscan/jsonl.hpp"

namespace spscan {

namespace {

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& v, const std::string& where) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        std::string out;
        for (size_t i = 1; i + 1 < v.size(); ++i) {
            if (v[i] == '\\' && i + 2 < v.size()) {
                ++i;
                switch (v[i]) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: fail(where + ": unsupported escape \\" + v[i]);
                }
            } else {
                out.push_back(v[i]);
            }
        }
        return out;
    }
    return v;
}

}  // namespace

kv_config kv_config::parse_text(const std::string& text, const std::string& origin) {
    kv_config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string where = origin + ":" + std::to_string(line_no);
        std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail(where + ": unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) fail(where + ": empty section name");
            continue;
        }
        size_t eq = body.find('=');
        if (eq == std::string::npos) fail(where + ": expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty()) fail(where + ": empty key");
        if (value.empty()) fail(where + ": empty value for key '" + key + "'");
        if (!section.empty()) key = section + "." + key;
        bool is_array = value.front() == '[';
        if (is_array) {
            if (value.back() != ']') fail(where + ": unterminated array for key '" + key + "'");
            value = trim(value.substr(1, value.size() - 2));
        } else {
            value = unquote(value, where);
        }
        cfg.values_[key] = {value, is_array};
    }
    return cfg;
}

kv_config kv_config::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path.string());
}

const std::string& kv_config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(origin_ + ": missing config key '" + key + "'");
    return it->second.first;
}

std::string kv_config::get_string(const std::string& key) const { return raw(key); }

std::string kv_config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

int64_t kv_config::get_int(const std::string& key) const {
    const std::string& v = raw(key);
    int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        fail(origin_ + ": key '" + key + "' is not an integer: " + v);
    return out;
}

int64_t kv_config::get_int(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double kv_config::get_double(const std::string& key) const {
    const std::string& v = raw(key);
    try {
        size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail(origin_ + ": key '" + key + "' is not a number: " + v);
    }
}

double kv_config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

bool kv_config::get_bool(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true") return true;
    if (v == "false") return false;
    fail(origin_ + ": key '" + key + "' is not a bool: " + v);
}

bool kv_config::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> kv_config::get_list(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(origin_ + ": missing config key '" + key + "'");
    std::vector<std::string> out;
    if (trim(it->second.first).empty()) return out;
    for (const std::string& part : split(it->second.first, ',')) {
        std::string v = trim(part);
        out.push_back(unquote(v, origin_));
    }
    return out;
}

std::vector<std::string> kv_config::get_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const {
    return has(key) ? get_list(key) : fallback;
}

void manifest::add(const std::string& key, const std::string& value) {
    rows_.emplace_back(key, value);
}

void manifest::add(const std::string& key, int64_t value) {
    rows_.emplace_back(key, std::to_string(value));
}

void manifest::add(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    rows_.emplace_back(key, os.str());
}

void manifest::write(const std::filesystem::path& path) const {
    atomic_writer w(path);
    for (const auto& [key, value] : rows_) {
        bool bare = !value.empty() &&
                    value.find_first_not_of("0123456789.+-eE") == std::string::npos;
        if (bare) {
            w.stream() << key << " = " << value << "\n";
        } else {
            std::string escaped;
            for (char c : value) {
                if (c == '"' || c == '\\') escaped.push_back('\\');
                escaped.push_back(c);
            }
            w.stream() << key << " = \"" << escaped << "\"\n";
        }
    }
    w.commit();
}

uint64_t file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path.string());
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace spscan
