#pragma once

#include <stdexcept>
#include <string>

namespace falcon {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or truncated archive bytes.
struct corrupt_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

} // namespace falcon
