#ifndef N1L_ERROR_HPP
#define N1L_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace n1l {

enum class ErrorCode {
  ZeroColumn,
  InvalidArgument,
  MalformedHeader,
  MalformedRow,
  RowWeight,
  ColumnRange,
  ClassRange,
  PartitionMismatch,
  NotACoset,
  InvalidConfiguration,
  TooLarge,
  StageOverflow,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::RowWeight: return "RowWeight";
    case ErrorCode::ColumnRange: return "ColumnRange";
    case ErrorCode::ClassRange: return "ClassRange";
    case ErrorCode::PartitionMismatch: return "PartitionMismatch";
    case ErrorCode::NotACoset: return "NotACoset";
    case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::StageOverflow: return "StageOverflow";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
/// Parse errors additionally carry the 1-based input line (0 if unknown).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int line = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  int line_;
};

}  // namespace n1l

#endif  // N1L_ERROR_HPP
