#include "rblkit/error.hpp"

namespace rblkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDegenerateConfiguration: return "degenerate-configuration";
    case ErrorCode::kDomainMismatch: return "domain-mismatch";
    case ErrorCode::kRankDeficiency: return "rank-deficiency";
    case ErrorCode::kUnderdetermined: return "under-determined";
    case ErrorCode::kAmbiguousAlignment: return "ambiguous-alignment";
    case ErrorCode::kInsufficientLinks: return "insufficient-links";
    case ErrorCode::kDegenerateEmbedding: return "degenerate-embedding";
  }
  return "unknown";
}

}  // namespace rblkit
