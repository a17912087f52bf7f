#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace interfere {

/// Flat "key = value" document whose first non-empty line is a fixed header.
/// Blank lines and lines starting with '#' are ignored; duplicate keys are
/// rejected. Errors are ParseError prefixed with `what`.
class KeyValueDoc {
public:
    static KeyValueDoc parse(std::string_view text, std::string_view header, std::string_view what);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& str(const std::string& key) const;
    double real(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::uint64_t count(const std::string& key) const;
    bool boolean(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::string what_;
    std::map<std::string, std::string> values_;
};

std::string_view trim(std::string_view s);

/// Whitespace-separated reals; throws ParseError naming `key` on bad input.
std::vector<double> parse_reals(std::string_view text, std::string_view key);
std::uint64_t parse_unsigned(std::string_view text, std::string_view key);

}  // namespace interfere
