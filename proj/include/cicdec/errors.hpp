// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cicdec {

// Bad configuration or arguments outside an operation's contract.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input data (samples, files).
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A filter design request that cannot be met; message carries the
// achieved numbers so callers can report requested vs. achieved.
struct design_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cicdec
