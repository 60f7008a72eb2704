#pragma once

#include <stdexcept>
#include <string>

namespace stablelab {

/// Invalid argument or parameter outside its mathematical domain.
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A numerical procedure failed to reach its accuracy target.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// CLI / config usage problem (unknown id, malformed spec string, ...).
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A statistical or model-validity check failed (certification, witness, ...).
class check_error : public std::runtime_error {
public:
    explicit check_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stablelab
