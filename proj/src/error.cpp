#include "bod/error.hpp"

namespace bod {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::NonPositiveValue: return "NonPositiveValue";
    case Errc::MissingCell: return "MissingCell";
    case Errc::DuplicateAttribute: return "DuplicateAttribute";
    case Errc::RowCountMismatch: return "RowCountMismatch";
    case Errc::NoDatasets: return "NoDatasets";
    case Errc::UnknownTuple: return "UnknownTuple";
    case Errc::SessionFinished: return "SessionFinished";
    case Errc::InvalidChoice: return "InvalidChoice";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::InvalidSnapshot: return "InvalidSnapshot";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::SessionDeleted: return "SessionDeleted";
  }
  return "Unknown";
}

}  // namespace bod
