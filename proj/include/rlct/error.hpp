#pragma once

#include <stdexcept>
#include <string>

namespace rlct {

/// Input outside an operation's mathematical domain (non-positive rate, r > H, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A rate vector matches more than one true component within tolerance.
class AmbiguityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumeration requested beyond the supported size.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sampler could not move (a block rejected every proposal over a window).
class TuningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantity that must be finite/positive was not (usually truncation or sampler failure).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed experiment config, CSV, or CLI input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rlct
