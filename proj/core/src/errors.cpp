#include "gestlang/errors.hpp"

namespace gestlang {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kStreamOrder: return "stream-order";
    case ErrorKind::kInvalidRegion: return "invalid-region";
    case ErrorKind::kInvalidScene: return "invalid-scene";
    case ErrorKind::kInvalidRaster: return "invalid-raster";
    case ErrorKind::kModelConfig: return "model-config";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kTrainingDiverged: return "training-diverged";
    case ErrorKind::kIncompatibleWeights: return "incompatible-weights";
    case ErrorKind::kUnknownId: return "unknown-id";
    case ErrorKind::kUnknownSession: return "unknown-session";
    case ErrorKind::kConfigParse: return "config-parse";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace gestlang
