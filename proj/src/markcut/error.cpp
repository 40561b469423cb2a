#include "markcut/error.h"

namespace markcut {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "ArgumentError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kBundle: return "BundleError";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kDetection: return "DetectionError";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometryError";
    case ErrorCode::kGeometry: return "GeometryError";
    case ErrorCode::kEmptyWorkspace: return "EmptyWorkspaceError";
    case ErrorCode::kSurfaceNotFound: return "SurfaceNotFoundError";
    case ErrorCode::kMalformedLoop: return "MalformedLoopError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kEmit: return "EmitError";
    case ErrorCode::kSimulation: return "SimulationError";
    case ErrorCode::kSpec: return "SpecError";
    case ErrorCode::kNotFound: return "NotFoundError";
    case ErrorCode::kConfirmBlocked: return "ConfirmBlockedError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "InternalError";
}

}  // namespace markcut
