#include "nrs/error.hpp"

namespace nrs {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "file not found";
    case ErrorCode::CorruptHeader: return "corrupt header";
    case ErrorCode::UnsupportedFormat: return "unsupported format";
    case ErrorCode::UnsupportedBitDepth: return "unsupported bit depth";
    case ErrorCode::Unwritable: return "unwritable path";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::OutOfBounds: return "out of bounds";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::EmptyMask: return "empty mask";
    case ErrorCode::EmptyInput: return "empty input";
  }
  return "unknown error";
}

}  // namespace nrs
