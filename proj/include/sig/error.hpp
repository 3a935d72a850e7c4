#pragma once

#include <stdexcept>
#include <string>

namespace sig {

/// Failure categories surfaced by the library. Parsing, matching, projection
/// and scoring all throw sig::Error carrying one of these codes.
enum class errc {
    malformed_json,
    unknown_color,
    unknown_kind,
    duplicate_order,
    out_of_range_coordinate,
    missing_self,
    non_contiguous_index,
    length_mismatch,
    index_out_of_range,
    non_integer,
    non_finite_cost,
    too_large,
    degenerate_d_max,
    invalid_spec,
    empty_trace,
    too_few_points,
    degenerate_configuration,
    singular_homography,
    size_mismatch,
    zero_gt,
    io_error,
    config_error,
};

inline const char* errc_name(errc c) noexcept {
    switch (c) {
        case errc::malformed_json: return "MalformedJson";
        case errc::unknown_color: return "UnknownColor";
        case errc::unknown_kind: return "UnknownKind";
        case errc::duplicate_order: return "DuplicateOrder";
        case errc::out_of_range_coordinate: return "OutOfRangeCoordinate";
        case errc::missing_self: return "MissingSelf";
        case errc::non_contiguous_index: return "NonContiguousIndex";
        case errc::length_mismatch: return "LengthMismatch";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::non_integer: return "NonInteger";
        case errc::non_finite_cost: return "NonFiniteCost";
        case errc::too_large: return "TooLarge";
        case errc::degenerate_d_max: return "DegenerateDMax";
        case errc::invalid_spec: return "InvalidSpec";
        case errc::empty_trace: return "EmptyTrace";
        case errc::too_few_points: return "TooFewPoints";
        case errc::degenerate_configuration: return "DegenerateConfiguration";
        case errc::singular_homography: return "SingularHomography";
        case errc::size_mismatch: return "SizeMismatch";
        case errc::zero_gt: return "ZeroGt";
        case errc::io_error: return "IoError";
        case errc::config_error: return "ConfigError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace sig
