#pragma once

#include <stdexcept>
#include <string>

namespace psb {

/// Malformed or out-of-contract argument (bad spec string, parameter out of
/// its documented range, structurally invalid request).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A certified computation could not separate the quantities involved within
/// the precision budget (interval refinement exhausted its doublings, or an
/// inexact atom fundamentally cannot decide the question).
struct PrecisionExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Index past the end of a stored expansion or table.
struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Sieve window wider than the supported maximum.
struct WindowTooLarge : std::length_error {
  using std::length_error::length_error;
};

/// Parameters fall outside the range hypothesis of the bound being checked.
struct HypothesisViolated : std::domain_error {
  using std::domain_error::domain_error;
};

/// An evaluation would require more terms than the configured budget.
struct TermBudgetExceeded : std::length_error {
  using std::length_error::length_error;
};

}  // namespace psb
