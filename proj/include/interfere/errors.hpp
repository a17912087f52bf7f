#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace interfere {

/// Precondition or invariant violated by a caller-supplied value.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input text or bytes (images, configs, network files, reports).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure; the message names the failing path.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(what + ": " + path), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Training produced a non-finite value.
class NumericError : public std::runtime_error {
public:
    NumericError(std::uint64_t iteration, const std::string& what)
        : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}

    std::uint64_t iteration() const noexcept { return iteration_; }

private:
    std::uint64_t iteration_;
};

}  // namespace interfere
