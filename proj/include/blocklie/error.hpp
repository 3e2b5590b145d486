#pragma once

#include <stdexcept>
#include <string>

namespace blocklie {

/// Caller passed operands that do not fit together (mixed variants, size mismatch, bad alphabet).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed serialized input. `field()` names the offending JSON path.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace blocklie
