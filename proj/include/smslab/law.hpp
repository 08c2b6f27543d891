#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smslab/claims.hpp"
#include "smslab/rational.hpp"
#include "smslab/sms.hpp"

namespace smslab {

// Step index used for the limit distribution.
inline constexpr int kLimit = 0;

using Dist = std::map<AnswerVector, Rational>;

// Distribution of the unordered output at one step, or at the limit.
// At the limit each atom also carries `reach`: the union of every claim set the
// process can still move to. `open` marks atoms whose future is not described by
// the kernel (rows missing beyond the horizon), so any superset is possible.
struct Law {
  struct Atom {
    ClaimSet set;
    ClaimSet reach;
    bool open = false;
    Rational mass;
  };
  std::vector<Atom> atoms;
  bool exact = true;
  std::string where;  // "step n" or "limit"
  int settled_at = 0; // limit: step whose law was used
};

[[nodiscard]] Law step_law(const SmsSpec& spec, int n);
// Needs kernel mode and backward consistency (declared kappa, else the smallest passing one).
[[nodiscard]] Law limit_law(const SmsSpec& spec);
[[nodiscard]] Law law_at(const SmsSpec& spec, int n);  // n == kLimit selects the limit

// Upward-closed event on the output claim set.
struct Event {
  ClaimSet superset;
  QuestionVector questions;           // each must be asked
  std::optional<Collection> collection;  // some member must be contained
  [[nodiscard]] bool holds(const ClaimSet& u) const;
  [[nodiscard]] bool possible(const ClaimSet& reach, bool open) const;
};

struct Bracket {
  Rational lower;
  Rational upper;
  [[nodiscard]] bool tight() const { return lower == upper; }
  [[nodiscard]] Rational width() const { return upper - lower; }
};

[[nodiscard]] Bracket prob(const Law& law, const Event& e);
// Exact probability; throws IndeterminateError when the bracket is loose.
[[nodiscard]] Rational prob_value(const Law& law, const Event& e);
// Probability that the output set equals s exactly (lower end at a loose limit).
[[nodiscard]] Rational prob_equal(const Law& law, const ClaimSet& s);

// Answer tuple distribution for qs given the event (qs are also required present).
// Throws ConditioningError on a null event, StructuralError if an atom repeats a question of qs.
[[nodiscard]] Dist cond_answers(const Law& law, const QuestionVector& qs, const Event& e);

// Operations keyed by spec and step.
[[nodiscard]] Rational prob_superset(const SmsSpec& spec, int n, const ClaimSet& s);
[[nodiscard]] Rational prob_exact(const SmsSpec& spec, int n, const ClaimSet& s);
[[nodiscard]] Rational semidist_question(const SmsSpec& spec, int n, const QuestionVector& qs,
                                         const ClaimSet& s);

struct Response {
  Dist dist;
  bool sure = false;
};
[[nodiscard]] Response response_dist(const SmsSpec& spec, int n, const QuestionVector& qs,
                                     const ClaimSet& s);
[[nodiscard]] bool is_sure(const Dist& d);

[[nodiscard]] Rational prob_collection(const SmsSpec& spec, int n, const Collection& coll,
                                       const ClaimSet& extra,
                                       const std::optional<QuestionVector>& qs = std::nullopt);
[[nodiscard]] Dist cond_response_on_collection(const SmsSpec& spec, int n, const QuestionVector& qs,
                                               const Collection& coll);

struct LimitValue {
  Rational value;
  Rational lower;
  Rational upper;
  int step = 0;  // step whose law produced the bracket
};
// Throws PreconditionError if not backward-consistent, HorizonError when the bracket exceeds tol.
[[nodiscard]] LimitValue limit_prob(const SmsSpec& spec, const ClaimSet& s, const Rational& tol);

[[nodiscard]] Dist trajectory_response_dist(const SmsSpec& spec, const std::vector<ClaimVector>& prefix,
                                            const Question& q);

struct McEstimate {
  double estimate = 0;
  double std_error = 0;
};
[[nodiscard]] McEstimate mc_estimate(const SmsSpec& spec, int n, const ClaimSet& s, std::uint64_t samples,
                                     std::uint64_t seed);

[[nodiscard]] std::string to_string(const Dist& d);

}  // namespace smslab
