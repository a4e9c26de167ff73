#pragma once

#include <stdexcept>
#include <string>

namespace glspec {

// Bad or inconsistent configuration input (unknown keys, wrong types, out-of-range
// parameters). Maps to CLI exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An empirical degree d_n(x) vanished where a positive value is required.
// Maps to CLI exit code 3.
struct degenerate_degree_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A spectral window whose boundary is too close to an eigenvalue, or which
// contains a point of the essential spectrum. Maps to CLI exit code 4.
struct ill_posed_window_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem / serialization failures. Maps to CLI exit code 5.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace glspec
