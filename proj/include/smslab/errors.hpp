#pragma once

#include <stdexcept>
#include <string>

#include "smslab/claims.hpp"
#include "smslab/rational.hpp"

namespace smslab {

struct SmsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conditioning on an event of probability zero.
struct ConditioningError : SmsError {
  QuestionVector questions;
  ClaimSet conditioning;
  std::string where;  // step number or "limit"
  ConditioningError(QuestionVector qs, ClaimSet s, std::string at)
      : SmsError("zero-probability conditioning event: questions " + to_string(qs) + " given " +
                 to_string(s) + " at " + at),
        questions(std::move(qs)),
        conditioning(std::move(s)),
        where(std::move(at)) {}
  explicit ConditioningError(const std::string& msg) : SmsError(msg) {}
};

struct HorizonError : SmsError {
  Rational lower = 0, upper = 1;
  using SmsError::SmsError;
  HorizonError(const std::string& msg, Rational lo, Rational hi)
      : SmsError(msg), lower(std::move(lo)), upper(std::move(hi)) {}
};

struct UnsupportedModeError : SmsError {
  using SmsError::SmsError;
};
struct PreconditionError : SmsError {
  using SmsError::SmsError;
};
struct StructuralError : SmsError {
  using SmsError::SmsError;
};
struct DomainError : SmsError {
  using SmsError::SmsError;
};
struct SupportError : SmsError {
  using SmsError::SmsError;
};
struct BudgetError : SmsError {
  using SmsError::SmsError;
};
// A limit quantity whose bracket is not tight at the horizon.
struct IndeterminateError : SmsError {
  using SmsError::SmsError;
};
struct ParseError : SmsError {
  using SmsError::SmsError;
};

}  // namespace smslab
