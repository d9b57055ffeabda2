#pragma once

#include <stdexcept>
#include <string>

namespace stablecubes {

// Bad caller-supplied data (unknown vertex, empty set, malformed JSON, ...).
struct input_error : std::invalid_argument {
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Parameters outside the range a construction is defined for (E <= 4*eps', M' < 8M, ...).
struct param_error : std::invalid_argument {
  explicit param_error(const std::string& what) : std::invalid_argument(what) {}
};

// Enumeration limits exceeded (wall-count bounds and friends).
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// A construction failed in a way that signals parameter misconfiguration or a
// low-quality instance (empty coordinate set, cyclic glued tree, ...).
struct construction_error : std::runtime_error {
  explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

// A provable internal invariant did not hold; aborting is the only sane option.
struct invariant_error : std::logic_error {
  explicit invariant_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace stablecubes
