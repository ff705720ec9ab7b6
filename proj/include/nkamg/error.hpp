#pragma once

#include <stdexcept>
#include <string>

namespace nkamg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error("dimension mismatch: " + what) {}
};

/// Raised by factorizations when a pivot is numerically zero.
class SingularError : public Error {
public:
    SingularError(const std::string& what, std::size_t index)
        : Error(what), pivot_index(index) {}
    std::size_t pivot_index;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

#define NKAMG_CHECK_DIM(cond, msg)                                             \
    do {                                                                       \
        if (!(cond)) throw ::nkamg::DimensionError(msg);                       \
    } while (0)

} // namespace nkamg
