#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdstop {

// Invalid or unresolvable configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

}  // namespace detail

// Flat `key = value` file with `[section]` headers and `#` comments.
// Later assignments of the same key win. No nesting, no quoting.
class Config {
public:
    static Config parse(std::istream& in) {
        Config cfg;
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3) {
                    throw ConfigError("config line " + std::to_string(line_no) +
                                      ": malformed section header");
                }
                section = detail::trim(line.substr(1, line.size() - 2));
                cfg.sections_.insert(section);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected key = value");
            }
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
            }
            cfg.values_[section + "/" + key] = value;
            cfg.keys_by_section_[section].push_back(key);
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file: " + path);
        }
        return parse(in);
    }

    bool has_section(const std::string& section) const {
        return sections_.count(section) > 0;
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "/" + key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        return get(section, key).value_or(fallback);
    }

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        return parse_double(*v, section, key);
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const int out = std::stoi(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return out;
        } catch (const std::exception&) {
            throw ConfigError("config [" + section + "] " + key + ": not an integer: " + *v);
        }
    }

    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const std::uint64_t out = std::stoull(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return out;
        } catch (const std::exception&) {
            throw ConfigError("config [" + section + "] " + key +
                              ": not an unsigned integer: " + *v);
        }
    }

    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = detail::trim(tok);
            if (tok.empty()) continue;
            out.push_back(parse_double(tok, section, key));
        }
        if (out.empty()) {
            throw ConfigError("config [" + section + "] " + key + ": empty list");
        }
        return out;
    }

    std::vector<std::string> get_string_list(const std::string& section, const std::string& key,
                                             const std::vector<std::string>& fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        std::vector<std::string> out;
        std::stringstream ss(*v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = detail::trim(tok);
            if (!tok.empty()) out.push_back(tok);
        }
        if (out.empty()) {
            throw ConfigError("config [" + section + "] " + key + ": empty list");
        }
        return out;
    }

    // Typo guard: every key in `section` must appear in `known`.
    void require_known_keys(const std::string& section,
                            const std::set<std::string>& known) const {
        const auto it = keys_by_section_.find(section);
        if (it == keys_by_section_.end()) return;
        for (const std::string& key : it->second) {
            if (known.count(key) == 0) {
                throw ConfigError("config [" + section + "]: unknown key: " + key);
            }
        }
    }

private:
    static double parse_double(const std::string& s, const std::string& section,
                               const std::string& key) {
        try {
            std::size_t pos = 0;
            const double out = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            return out;
        } catch (const std::exception&) {
            throw ConfigError("config [" + section + "] " + key + ": not a number: " + s);
        }
    }

    std::map<std::string, std::string> values_;
    std::map<std::string, std::vector<std::string>> keys_by_section_;
    std::set<std::string> sections_;
};

}  // namespace crowdstop
