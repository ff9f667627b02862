#pragma once

#include <stdexcept>
#include <string>

namespace spreadout {

// File-system / stream failures; the CLI maps this to its I/O exit code,
// separate from validation failures (std::invalid_argument / std::range_error).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spreadout
