#pragma once

#include <stdexcept>
#include <string>

namespace vdec {

/// Broad category of a rejected operation; the CLI maps these onto exit codes.
enum class ErrorKind {
  invalid_argument,  ///< caller-side precondition (bad name, length mismatch, bad config)
  data,              ///< malformed or unusable input data
  degenerate,        ///< numerically undefined result, e.g. fractions of zero variance
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::invalid_argument, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct DegenerateError : Error {
  explicit DegenerateError(const std::string& what)
      : Error(ErrorKind::degenerate, what) {}
};

}  // namespace vdec
