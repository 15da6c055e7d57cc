#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcboost {

/// key = value text with optional [section] headers. '#' and ';' start
/// comments. Keys before the first header belong to the "" section.
/// Entry order is preserved.
class Config {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
    };

    static Config parse(std::istream& in, std::string_view source = "<config>");
    static Config load(const std::filesystem::path& path);

    [[nodiscard]] const Section* section(std::string_view name) const;
    [[nodiscard]] const std::vector<Section>& sections() const noexcept { return sections_; }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }

    [[nodiscard]] std::optional<std::string> get(std::string_view section,
                                                 std::string_view key) const;
    /// Throws ConfigError when missing or not numeric.
    [[nodiscard]] double number(std::string_view section, std::string_view key) const;

private:
    std::string source_;
    std::vector<Section> sections_;
};

} // namespace pcboost
