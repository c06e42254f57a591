#pragma once

#include <stdexcept>
#include <string>

namespace pnqs {

// Bad user input: malformed config file, invalid geometry, out-of-range
// sizes.  The CLI maps this family to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Lattices that alias their own periodic images (L = 2 bonds, masks with
// k >= L/2) are rejected up front rather than silently double-counting.
class degenerate_lattice_error : public config_error {
 public:
  explicit degenerate_lattice_error(const std::string& msg)
      : config_error(msg) {}
};

// Non-finite energies, collapsed estimators and similar runtime blow-ups.
// The CLI maps this family to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pnqs
