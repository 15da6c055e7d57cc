#include "pcboost/config.hpp"

#include "pcboost/error.hpp"
#include "pcboost/text.hpp"

#include <fstream>

namespace pcboost {

Config Config::parse(std::istream& in, std::string_view source) {
    Config cfg;
    cfg.source_ = source;
    cfg.sections_.push_back(Section{"", {}});
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = trim(line);
        if (text.empty() || text.front() == '#' || text.front() == ';') continue;
        const auto where = std::string(source) + ":" + std::to_string(line_no);
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError(where + ": unterminated section header");
            const auto name = trim(text.substr(1, text.size() - 2));
            if (name.empty()) throw ConfigError(where + ": empty section name");
            if (cfg.section(name)) throw ConfigError(where + ": duplicate section [" +
                                                     std::string(name) + "]");
            cfg.sections_.push_back(Section{std::string(name), {}});
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        auto& entries = cfg.sections_.back().entries;
        for (const auto& e : entries) {
            if (e.key == key) throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
        }
        entries.push_back(Entry{std::string(key), std::string(value), line_no});
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse(in, path.string());
}

const Config::Section* Config::section(std::string_view name) const {
    for (const auto& s : sections_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::optional<std::string> Config::get(std::string_view section_name, std::string_view key) const {
    const auto* s = section(section_name);
    if (!s) return std::nullopt;
    for (const auto& e : s->entries) {
        if (e.key == key) return e.value;
    }
    return std::nullopt;
}

double Config::number(std::string_view section_name, std::string_view key) const {
    const auto value = get(section_name, key);
    const auto label = "[" + std::string(section_name) + "] " + std::string(key);
    if (!value) throw ConfigError(source_ + ": missing " + label);
    const auto parsed = parse_number(*value);
    if (!parsed) throw ConfigError(source_ + ": " + label + " is not a number: '" + *value + "'");
    return *parsed;
}

} // namespace pcboost
