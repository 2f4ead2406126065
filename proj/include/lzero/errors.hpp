#pragma once
#include <stdexcept>
#include <string>

namespace lzero {

/// Bad user-supplied data (shapes, schemas, dimension mismatches).
struct malformed_input : std::runtime_error {
    explicit malformed_input(const std::string& what) : std::runtime_error(what) {}
};

/// Request outside the supported fragment (infinite enumeration, rules
/// leaving the representable class).
struct unsupported_input : std::runtime_error {
    explicit unsupported_input(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition was violated (ill-defined morphism, object
/// not in the reflective subcategory).
struct contract_violation : std::runtime_error {
    explicit contract_violation(const std::string& what) : std::runtime_error(what) {}
};

/// States that must be unreachable; reaching one is a bug, not bad input.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace lzero
