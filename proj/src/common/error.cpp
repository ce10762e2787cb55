#include "common/error.hpp"

namespace claimsearch {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::MissingDocId: return "MissingDocId";
    case ErrorCode::DocMismatch: return "DocMismatch";
    case ErrorCode::EmptyResolution: return "EmptyResolution";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::PoolTooSmall: return "PoolTooSmall";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
    case ErrorCode::TextTooLong: return "TextTooLong";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyClaim: return "EmptyClaim";
    case ErrorCode::NoChunks: return "NoChunks";
    case ErrorCode::NoElements: return "NoElements";
    case ErrorCode::NoParagraphs: return "NoParagraphs";
    case ErrorCode::WeightMisalignment: return "WeightMisalignment";
    case ErrorCode::ProviderMismatch: return "ProviderMismatch";
    case ErrorCode::DuplicateChunkRef: return "DuplicateChunkRef";
    case ErrorCode::DocNotFound: return "DocNotFound";
    case ErrorCode::ScorerFailure: return "ScorerFailure";
    case ErrorCode::IndexNotLoaded: return "IndexNotLoaded";
  }
  return "Unknown";
}

}  // namespace claimsearch
