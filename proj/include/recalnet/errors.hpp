#pragma once

#include <stdexcept>
#include <string>

namespace recalnet {

/// Raised when a frozen centroid table would be mutated.
class FreezeViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Checkpoint I/O failure with a machine-checkable reason.
class CheckpointError : public std::runtime_error {
 public:
  enum class Code { missing_file, version_mismatch, shape_mismatch, malformed };

  CheckpointError(Code code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

/// Bad config/spec/CSV input; the message carries file and line context.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace recalnet
