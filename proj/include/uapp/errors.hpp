#pragma once

#include <stdexcept>
#include <string>

namespace uapp {

/// Base for every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define UAPP_DEFINE_ERROR(Name)                                          \
  class Name : public Error {                                            \
   public:                                                                \
    using Error::Error;                                                   \
    const char* kind() const noexcept override { return #Name; }          \
  };

UAPP_DEFINE_ERROR(InvalidArgument)
UAPP_DEFINE_ERROR(NoConflict)
UAPP_DEFINE_ERROR(EmptyCandidateSet)
UAPP_DEFINE_ERROR(UnknownCandidate)
UAPP_DEFINE_ERROR(DegenerateWeights)
UAPP_DEFINE_ERROR(ShortTrack)
UAPP_DEFINE_ERROR(NonTerminating)
UAPP_DEFINE_ERROR(HorizonExceedsTrace)
UAPP_DEFINE_ERROR(SchemaError)
UAPP_DEFINE_ERROR(ConfigError)
UAPP_DEFINE_ERROR(IoError)

#undef UAPP_DEFINE_ERROR

/// Parse failure carrying the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  const char* kind() const noexcept override { return "ParseError"; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace uapp
