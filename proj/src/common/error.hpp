#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace claimsearch {

enum class ErrorCode {
  InvalidArgument,
  Io,
  MalformedXml,
  MissingDocId,
  DocMismatch,
  EmptyResolution,
  ConfigError,
  PoolTooSmall,
  DegenerateSplit,
  RemoteUnavailable,
  TextTooLong,
  DimMismatch,
  EmptyClaim,
  NoChunks,
  NoElements,
  NoParagraphs,
  WeightMisalignment,
  ProviderMismatch,
  DuplicateChunkRef,
  DocNotFound,
  ScorerFailure,
  IndexNotLoaded,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace claimsearch
