#include "enclosure/error.hpp"

namespace enclosure {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidDirection: return "invalid-direction";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::InvalidShape: return "invalid-shape";
    case ErrorCode::InvalidDomain: return "invalid-domain";
    case ErrorCode::DegenerateHull: return "degenerate-hull";
    case ErrorCode::DegenerateBackground: return "degenerate-background";
    case ErrorCode::InvalidConstants: return "invalid-constants";
    case ErrorCode::EmptySlab: return "empty-slab";
    case ErrorCode::InvalidScene: return "invalid-scene";
    case ErrorCode::ResourceLimit: return "resource-limit";
    case ErrorCode::InvalidMesh: return "invalid-mesh";
    case ErrorCode::Assembly: return "assembly";
    case ErrorCode::Solve: return "solve";
    case ErrorCode::Interface: return "interface";
    case ErrorCode::ProbeUnderresolved: return "probe-underresolved";
    case ErrorCode::Estimation: return "estimation";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace enclosure
