// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vqinit {

/// Broad failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  kInvalidArgument,  // precondition violated by the caller
  kOutOfRange,       // index or size outside the permitted range
  kNumerical,        // non-finite value, divergence, non-convergence
  kInternal,         // internal consistency check failed
  kIo,               // file could not be opened, read or written
  kFormat,           // malformed, corrupted or version-mismatched data
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace vqinit
