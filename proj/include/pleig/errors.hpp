// SPDX-License-Identifier: Apache-2.0
#ifndef PLEIG_ERRORS_HPP
#define PLEIG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pleig {

/// Failure categories. Values match the C API status codes so that errors
/// crossing the shared-library boundary keep their category.
enum class ErrorCategory : int {
  Io = 1,
  Parse = 2,
  Invalid = 3,
  Mesh = 4,
  Solver = 5,
  Check = 6,
  Internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

inline Error io_error(const std::string& msg) { return Error(ErrorCategory::Io, msg); }
inline Error parse_error(const std::string& msg) { return Error(ErrorCategory::Parse, msg); }
inline Error invalid_error(const std::string& msg) { return Error(ErrorCategory::Invalid, msg); }
inline Error mesh_error(const std::string& msg) { return Error(ErrorCategory::Mesh, msg); }
inline Error solver_error(const std::string& msg) { return Error(ErrorCategory::Solver, msg); }
inline Error check_error(const std::string& msg) { return Error(ErrorCategory::Check, msg); }

}  // namespace pleig

#endif
