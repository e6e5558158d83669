#pragma once

#include <stdexcept>
#include <string>

namespace avim {

// Base of every error raised by the library.
struct error: std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite state or input encountered while integrating.
struct integration_error: error {
    using error::error;
};

// Invalid parameters, sizes or config values.
struct config_error: error {
    using error::error;
};

// Input outside its declared domain (e.g. activation outside [0,1]).
struct validation_error: error {
    using error::error;
};

// No NOSC codebook satisfying the constraints was found within the draw budget.
struct infeasible_error: error {
    using error::error;
};

// FV dataset / codebook / config parsing failures.
struct parse_error: error {
    using error::error;
};

struct malformed_header_error: parse_error {
    using parse_error::parse_error;
};

struct row_length_error: parse_error {
    using parse_error::parse_error;
};

struct out_of_range_error: parse_error {
    using parse_error::parse_error;
};

// Decoder asked to learn from an all-silent mean pattern.
struct zero_norm_error: error {
    using error::error;
};

} // namespace avim
