#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gestlang {

enum class ErrorKind {
  kStreamOrder,
  kInvalidRegion,
  kInvalidScene,
  kInvalidRaster,
  kModelConfig,
  kInvalidArgument,
  kTrainingDiverged,
  kIncompatibleWeights,
  kUnknownId,
  kUnknownSession,
  kConfigParse,
  kProtocol,
  kFormat,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this one exception type; the
// kind is what callers (the CLI, the service) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gestlang
