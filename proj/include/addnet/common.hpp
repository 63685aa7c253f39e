#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace addnet {

static_assert(std::numeric_limits<double>::is_iec559,
              "addnet requires IEEE-754 binary64 arithmetic");

// Incompatible dimensions between containers / layers.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid argument value (bad range, unknown enum, malformed spec).
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed file contents (IDX stream, checkpoint).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
struct DivergenceError : std::runtime_error {
    DivergenceError(std::size_t epoch, std::size_t batch, const std::string& what)
        : std::runtime_error(what), epoch(epoch), batch(batch) {}
    std::size_t epoch;
    std::size_t batch;
};

}  // namespace addnet
