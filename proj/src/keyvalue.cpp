#include "interfere/keyvalue.hpp"

#include <charconv>

#include <fmt/format.h>

#include "interfere/errors.hpp"

namespace interfere {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<double> parse_reals(std::string_view text, std::string_view key) {
    std::vector<double> out;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t')) {
            ++p;
        }
        if (p == end) {
            break;
        }
        double v = 0.0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
            throw ParseError(fmt::format("bad number in '{}'", key));
        }
        out.push_back(v);
        p = next;
    }
    return out;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view key) {
    text = trim(text);
    std::uint64_t v = 0;
    auto [next, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || next != text.data() + text.size()) {
        throw ParseError(fmt::format("'{}' is not a non-negative integer", key));
    }
    return v;
}

KeyValueDoc KeyValueDoc::parse(std::string_view text, std::string_view header, std::string_view what) {
    KeyValueDoc doc;
    doc.what_ = std::string(what);
    bool header_seen = false;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || (header_seen && line.front() == '#')) {
            continue;
        }
        if (!header_seen) {
            if (line != header) {
                throw ParseError(fmt::format("{}: expected header '{}'", what, header));
            }
            header_seen = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(fmt::format("{}: line {} is not 'key = value'", what, line_no));
        }
        std::string key{trim(line.substr(0, eq))};
        if (key.empty()) {
            throw ParseError(fmt::format("{}: line {} has an empty key", what, line_no));
        }
        if (!doc.values_.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
            throw ParseError(fmt::format("{}: duplicate key '{}'", what, key));
        }
    }
    if (!header_seen) {
        throw ParseError(fmt::format("{}: empty input", what));
    }
    return doc;
}

const std::string& KeyValueDoc::str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ParseError(fmt::format("{}: missing key '{}'", what_, key));
    }
    return it->second;
}

double KeyValueDoc::real(const std::string& key) const {
    const auto v = reals(key);
    if (v.size() != 1) {
        throw ParseError(fmt::format("{}: '{}' must hold exactly one number", what_, key));
    }
    return v[0];
}

std::vector<double> KeyValueDoc::reals(const std::string& key) const {
    try {
        return parse_reals(str(key), key);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", what_, e.what()));
    }
}

std::uint64_t KeyValueDoc::count(const std::string& key) const {
    try {
        return parse_unsigned(str(key), key);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", what_, e.what()));
    }
}

bool KeyValueDoc::boolean(const std::string& key) const {
    const std::string& v = str(key);
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ParseError(fmt::format("{}: '{}' must be true or false", what_, key));
}

}  // namespace interfere
