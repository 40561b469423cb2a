#pragma once

#include <stdexcept>
#include <string>

namespace markcut {

// Error kinds surfaced through the C API as status codes.
enum class ErrorCode {
  kArgument = 1,
  kValidation,
  kBundle,
  kFormat,
  kDetection,
  kDegenerateGeometry,
  kGeometry,
  kEmptyWorkspace,
  kSurfaceNotFound,
  kMalformedLoop,
  kParse,
  kEmit,
  kSimulation,
  kSpec,
  kNotFound,
  kConfirmBlocked,
  kIo,
  kInternal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define MARKCUT_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(Code, message) {}   \
  };

MARKCUT_DEFINE_ERROR(ArgumentError, ErrorCode::kArgument)
MARKCUT_DEFINE_ERROR(ValidationError, ErrorCode::kValidation)
MARKCUT_DEFINE_ERROR(BundleError, ErrorCode::kBundle)
MARKCUT_DEFINE_ERROR(FormatError, ErrorCode::kFormat)
MARKCUT_DEFINE_ERROR(DegenerateGeometryError, ErrorCode::kDegenerateGeometry)
MARKCUT_DEFINE_ERROR(GeometryError, ErrorCode::kGeometry)
MARKCUT_DEFINE_ERROR(EmptyWorkspaceError, ErrorCode::kEmptyWorkspace)
MARKCUT_DEFINE_ERROR(SurfaceNotFoundError, ErrorCode::kSurfaceNotFound)
MARKCUT_DEFINE_ERROR(MalformedLoopError, ErrorCode::kMalformedLoop)
MARKCUT_DEFINE_ERROR(EmitError, ErrorCode::kEmit)
MARKCUT_DEFINE_ERROR(SimulationError, ErrorCode::kSimulation)
MARKCUT_DEFINE_ERROR(SpecError, ErrorCode::kSpec)
MARKCUT_DEFINE_ERROR(NotFoundError, ErrorCode::kNotFound)
MARKCUT_DEFINE_ERROR(ConfirmBlockedError, ErrorCode::kConfirmBlocked)
MARKCUT_DEFINE_ERROR(IoError, ErrorCode::kIo)

#undef MARKCUT_DEFINE_ERROR

class DetectionError : public Error {
 public:
  DetectionError(int found, int expected)
      : Error(ErrorCode::kDetection,
              "detected " + std::to_string(found) + " fiducials, expected " +
                  std::to_string(expected)),
        found_(found) {}
  int found() const { return found_; }

 private:
  int found_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(ErrorCode::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace markcut
