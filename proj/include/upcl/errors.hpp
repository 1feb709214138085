#ifndef UPCL_ERRORS_HPP
#define UPCL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace upcl {

// Raised for malformed config files, manifests, or CLI arguments (exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for numerical failures such as a correlation matrix that stays
// indefinite after the full jitter ladder (exit code 2).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace upcl

#endif
