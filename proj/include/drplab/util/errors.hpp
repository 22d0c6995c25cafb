#pragma once

#include <stdexcept>
#include <string>

namespace drplab {

// Invalid configuration or malformed input; the CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A runtime guard tripped (search too large, missing file at run time);
// the CLI maps this to exit code 3.
class GuardError : public std::runtime_error {
public:
    explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace drplab
