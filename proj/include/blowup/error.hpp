#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Argument outside the mathematical domain of a function (e.g. fujita(h) with h <= 0).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// A named hypothesis of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
    PreconditionError(std::string hypothesis, const std::string& msg)
        : std::invalid_argument(msg), hypothesis_(std::move(hypothesis)) {}

    const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    std::string hypothesis_;
};

/// Parameter combination outside every documented literature case.
class UncoveredCase : public std::invalid_argument {
public:
    explicit UncoveredCase(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Invalid configuration (grid, sweep, CLI keys). `field` names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& msg)
        : std::invalid_argument(msg), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace blowup
