#pragma once

#include <stdexcept>
#include <string>

namespace bellforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NormalizationError : Error { using Error::Error; };
struct IncompleteError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct UnknownVariable : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct UnknownSetting : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };
struct ComposeError : Error { using Error::Error; };
struct TooManySpins : Error { using Error::Error; };
struct PartitionError : Error { using Error::Error; };
struct BadArrangement : Error { using Error::Error; };
struct BadSymmetry : Error { using Error::Error; };
struct SpaceTooLarge : Error { using Error::Error; };
struct BadStart : Error { using Error::Error; };
struct BadSlice : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace bellforge
