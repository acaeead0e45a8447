#include "aslb/error.hpp"

namespace aslb {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_spec: return "invalid-spec";
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::empty_interval: return "empty-interval";
        case ErrorKind::resolution_too_coarse: return "resolution-too-coarse";
        case ErrorKind::disjoint: return "disjoint";
        case ErrorKind::empty_ladder: return "empty-ladder";
        case ErrorKind::out_of_range: return "out-of-range";
        case ErrorKind::not_monotone: return "not-monotone";
        case ErrorKind::grid_mismatch: return "grid-mismatch";
        case ErrorKind::not_a_maximum: return "not-a-maximum";
        case ErrorKind::no_maximum_found: return "no-maximum-found";
        case ErrorKind::depth_exceeded: return "depth-exceeded";
        case ErrorKind::parameter_violation: return "parameter-violation";
        case ErrorKind::infeasible: return "infeasible";
        case ErrorKind::audit_failure: return "audit-failure";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace aslb
