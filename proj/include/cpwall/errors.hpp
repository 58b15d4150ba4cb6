#pragma once

#include <stdexcept>
#include <string>

namespace cpwall {

/// Invalid argument or out-of-range input (maps to CLI exit code 2).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Kernel evaluated at (or too close to) the resonance pole kappa = 1.
/// Integrals across the pole must go through the principal-value window
/// instead of sampling the kernel directly.
struct PoleError : DomainError {
    using DomainError::DomainError;
};

}  // namespace cpwall
