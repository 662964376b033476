// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lcs {

// Error classes surfaced by the library. The C API maps these one-to-one
// onto lcs_status values.
enum class Errc {
  invalid_argument,
  dimension,
  not_found,
  io,
  malformed,
  unsupported,
  truncated,
  capacity,
  divergence,
  mismatch,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Thrown by the solver when an iterate stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(int iteration, const std::string& what)
      : Error(Errc::divergence, what), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace lcs
