#ifndef TRAJFAIR_ERROR_H_
#define TRAJFAIR_ERROR_H_

#include <stdexcept>
#include <string>

namespace trajfair {

// Failure categories. The CLI maps these onto exit codes 1, 2 and 3.
enum class ErrorKind { kInput, kConfig, kInvariant };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed or missing input data.
class InputError : public Error {
 public:
  explicit InputError(const std::string& message)
      : Error(ErrorKind::kInput, message) {}
};

// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::kConfig, message) {}
};

// A post-condition the library itself should have guaranteed did not hold.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message)
      : Error(ErrorKind::kInvariant, message) {}
};

}  // namespace trajfair

#endif  // TRAJFAIR_ERROR_H_
