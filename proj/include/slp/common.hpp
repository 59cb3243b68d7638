#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace slp {

// Error taxonomy used across the library. The CLI maps these onto exit
// codes: ConfigError/DataError -> 3 (bad data or parameters), anything
// else escaping to main -> 4 (internal).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or parameters (bad probability, odd degree sum, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent input data (files, edge lists, label tables).
class DataError : public Error {
public:
    using Error::Error;
};

// A numeric contract was violated (exactness overflow, undefined division).
class NumericError : public Error {
public:
    using Error::Error;
};

// Shortest decimal string that round-trips to the same double. All CSV and
// JSON output goes through this so reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace slp
