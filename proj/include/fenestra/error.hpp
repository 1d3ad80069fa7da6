#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fenestra {

/// Base of every error the toolkit throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FENESTRA_DEFINE_ERROR(Name)          \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

FENESTRA_DEFINE_ERROR(ParseError);
FENESTRA_DEFINE_ERROR(ValidationError);
FENESTRA_DEFINE_ERROR(GeometryError);
FENESTRA_DEFINE_ERROR(DegenerateGap);
FENESTRA_DEFINE_ERROR(ShortFileError);
FENESTRA_DEFINE_ERROR(NumericalError);
FENESTRA_DEFINE_ERROR(SpawnError);
FENESTRA_DEFINE_ERROR(ProtocolError);
FENESTRA_DEFINE_ERROR(TimeoutError);
FENESTRA_DEFINE_ERROR(EmptyNeighborhood);
FENESTRA_DEFINE_ERROR(IncompleteResult);
FENESTRA_DEFINE_ERROR(EmptyTable);
FENESTRA_DEFINE_ERROR(TooFewRows);
FENESTRA_DEFINE_ERROR(UnknownField);
FENESTRA_DEFINE_ERROR(DegenerateSamples);
FENESTRA_DEFINE_ERROR(MismatchedBudgets);
FENESTRA_DEFINE_ERROR(ConfigError);

#undef FENESTRA_DEFINE_ERROR

/// Evaluation failure carrying the canonical design key it happened on.
class EvaluationError : public Error {
 public:
  EvaluationError(std::string key, const std::string& what)
      : Error("evaluation of design " + key + " failed: " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace fenestra
