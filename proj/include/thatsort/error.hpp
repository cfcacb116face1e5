#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace thatsort {

enum class Errc {
  MalformedLine,
  NonContiguousIds,
  HeadOutOfRange,
  MissingTagSeparator,
  UnknownGoldTag,
  AlignmentMismatch,
  EmptyCorpus,
  UntaggedToken,
  EmptySentence,
  VersionMismatch,
  CorruptModel,
  ScheduleExceedsCorpus,
  EmptyType,
  InvalidArgument,
  Io,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::NonContiguousIds: return "NonContiguousIds";
    case Errc::HeadOutOfRange: return "HeadOutOfRange";
    case Errc::MissingTagSeparator: return "MissingTagSeparator";
    case Errc::UnknownGoldTag: return "UnknownGoldTag";
    case Errc::AlignmentMismatch: return "AlignmentMismatch";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::UntaggedToken: return "UntaggedToken";
    case Errc::EmptySentence: return "EmptySentence";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptModel: return "CorruptModel";
    case Errc::ScheduleExceedsCorpus: return "ScheduleExceedsCorpus";
    case Errc::EmptyType: return "EmptyType";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. `line()` is the 1-based input line
/// when the error is tied to a position in a text file, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::size_t line = 0)
      : std::runtime_error(format(code, message, line)),
        code_(code),
        line_(line) {}

  Errc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(Errc code, const std::string& message,
                            std::size_t line) {
    std::string out(errc_name(code));
    if (line != 0) out += " at line " + std::to_string(line);
    out += ": ";
    out += message;
    return out;
  }

  Errc code_;
  std::size_t line_;
};

}  // namespace thatsort
