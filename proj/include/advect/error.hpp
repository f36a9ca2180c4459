#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace advect {

enum class ErrorKind {
    // geometry
    self_intersecting,
    degenerate_area,
    empty_set,
    // fields
    syntax_error,
    unknown_identifier,
    domain_error,
    non_differentiable,
    // characteristics
    step_underflow,
    start_outside,
    // quadrature / solver
    too_close_to_boundary,
    footpoint_on_characteristic_arc,
    attenuation_not_decayed,
    test_function_not_admissible,
    // diagnostics
    hypothesis_failed,
    not_vanishing,
    exponent_out_of_window,
    // configuration
    invalid_config,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::self_intersecting: return "SelfIntersecting";
    case ErrorKind::degenerate_area: return "DegenerateArea";
    case ErrorKind::empty_set: return "EmptySet";
    case ErrorKind::syntax_error: return "SyntaxError";
    case ErrorKind::unknown_identifier: return "UnknownIdentifier";
    case ErrorKind::domain_error: return "DomainError";
    case ErrorKind::non_differentiable: return "NonDifferentiable";
    case ErrorKind::step_underflow: return "StepUnderflow";
    case ErrorKind::start_outside: return "StartOutside";
    case ErrorKind::too_close_to_boundary: return "TooCloseToBoundary";
    case ErrorKind::footpoint_on_characteristic_arc: return "FootpointOnCharacteristicArc";
    case ErrorKind::attenuation_not_decayed: return "AttenuationNotDecayed";
    case ErrorKind::test_function_not_admissible: return "TestFunctionNotAdmissible";
    case ErrorKind::hypothesis_failed: return "HypothesisFailed";
    case ErrorKind::not_vanishing: return "NotVanishing";
    case ErrorKind::exponent_out_of_window: return "ExponentOutOfWindow";
    case ErrorKind::invalid_config: return "InvalidConfig";
    }
    return "Unknown";
}

/// Numerical failures that a CLI maps to exit code 3; everything else is a
/// configuration/validation problem (exit code 2).
inline bool is_numerical(ErrorKind k) {
    switch (k) {
    case ErrorKind::domain_error:
    case ErrorKind::non_differentiable:
    case ErrorKind::step_underflow:
    case ErrorKind::too_close_to_boundary:
    case ErrorKind::footpoint_on_characteristic_arc:
    case ErrorKind::attenuation_not_decayed:
    case ErrorKind::hypothesis_failed:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> offset = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), offset_(offset) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Byte offset into the source text for parser errors.
    std::optional<std::size_t> offset() const noexcept { return offset_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> offset_;
};

} // namespace advect
