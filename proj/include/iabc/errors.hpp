#pragma once

#include <stdexcept>
#include <string>

namespace iabc {

/// Invalid input: malformed files, inconsistent configs, violated preconditions.
/// CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A runtime check that must hold by construction failed (reconstruction
/// mismatch, missing dominance witness, broken certificate). Exit code 1.
struct VerificationError : std::runtime_error {
    explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace iabc
