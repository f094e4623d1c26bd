#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

/// Bad or inconsistent input: malformed files, dimension mismatches, invalid
/// parameters. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical precondition or invariant failed (zero degree, eigenvalue
/// below the floor, singular system). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File system or archive format failure. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace spectral
