#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bod {

enum class Errc {
  EmptyInput,
  NonNumericCell,
  NonPositiveValue,
  MissingCell,
  DuplicateAttribute,
  RowCountMismatch,
  NoDatasets,
  UnknownTuple,
  SessionFinished,
  InvalidChoice,
  DigestMismatch,
  InvalidSnapshot,
  InvalidConfig,
  Io,
  UnknownSession,
  SessionDeleted,
};

std::string_view to_string(Errc code);

/// Every failure surfaced by the library carries one of the codes above; the
/// CLI and HTTP layers map codes to exit statuses and response codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bod
