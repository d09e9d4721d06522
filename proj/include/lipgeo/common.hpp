#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lipgeo {

using Index = std::size_t;

/// Default tolerance for geometric predicates. Every operation that compares
/// floating-point geometry takes an explicit tolerance; this is only the
/// default value, never a hidden constant inside a predicate.
inline constexpr double kDefaultTol = 1e-9;

/// Bad input data: malformed files, parameters out of their documented
/// ranges, invariant violations in user-supplied objects. CLI exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A certified check failed on valid input (a residual above tolerance, a
/// contract audit that found a violating pair). CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal invariant breach; indicates a bug. CLI exit code 3.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace lipgeo
