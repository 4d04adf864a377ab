#include "polent/error.hpp"

namespace polent {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::EmptySupport: return "empty-support";
    case ErrorKind::DegeneratePostSelection: return "degenerate-post-selection";
    case ErrorKind::NonphysicalCoherence: return "nonphysical-coherence";
    case ErrorKind::InterpolationDomain: return "interpolation-domain";
    case ErrorKind::UnidentifiableFit: return "unidentifiable-fit";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::Config: return "config";
    case ErrorKind::Format: return "format";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Usage:
      return 2;
    case ErrorKind::Format:
      return 4;
    default:
      return 3;
  }
}

}  // namespace polent
