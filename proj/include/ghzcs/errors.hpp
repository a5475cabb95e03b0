#pragma once

#include <stdexcept>
#include <string>

namespace ghzcs {

// Qubit counts or enumeration sizes above the supported bounds.
class ResourceLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Flag post-selection discarded every shot; the caller decides the fallback.
class EmptyPostselectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The two-column OLS design matrix is numerically rank-deficient for the
// detected frequency; the caller should resample angles.
class DegenerateAnglesError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Readout-correction scaling factor too small to divide by reliably.
class AmplificationOverflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace ghzcs
