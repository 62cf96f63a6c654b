#pragma once

#include <stdexcept>
#include <string>

namespace mbl {

struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BehindCameraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDepthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfBoundsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NodataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mbl
