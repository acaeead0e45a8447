#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aslb {

enum class ErrorKind {
    invalid_spec,
    invalid_argument,
    empty_interval,
    resolution_too_coarse,
    disjoint,
    empty_ladder,
    out_of_range,
    not_monotone,
    grid_mismatch,
    not_a_maximum,
    no_maximum_found,
    depth_exceeded,
    parameter_violation,
    infeasible,
    audit_failure,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace aslb
