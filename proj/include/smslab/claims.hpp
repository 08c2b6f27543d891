#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace smslab {

using Question = std::string;
using Answer = std::string;
using QuestionVector = std::vector<Question>;
using AnswerVector = std::vector<Answer>;

struct Claim {
  Question question;
  Answer answer;
  auto operator<=>(const Claim&) const = default;
};

using ClaimVector = std::vector<Claim>;
// std::set keeps the canonical order (question, then answer).
using ClaimSet = std::set<Claim>;
// "Some member is a subset of the emitted claim set."
using Collection = std::set<ClaimSet>;

[[nodiscard]] ClaimSet unorder(const ClaimVector& v);

[[nodiscard]] bool is_subset(const ClaimSet& small, const ClaimSet& big);
[[nodiscard]] ClaimSet set_union(const ClaimSet& a, const ClaimSet& b);
[[nodiscard]] ClaimSet with_claim(ClaimSet s, const Claim& c);

// True when some claim in s answers q.
[[nodiscard]] bool asks(const ClaimSet& s, const Question& q);
// The answers s gives to q (several when the set repeats a question).
[[nodiscard]] std::vector<Answer> answers_to(const ClaimSet& s, const Question& q);

// Every subset of s, in a deterministic order (by bitmask over the canonical order).
[[nodiscard]] std::vector<ClaimSet> all_subsets(const ClaimSet& s);

[[nodiscard]] std::string to_string(const Claim& c);
[[nodiscard]] std::string to_string(const ClaimSet& s);
[[nodiscard]] std::string to_string(const ClaimVector& v);
[[nodiscard]] std::string to_string(const QuestionVector& qs);
[[nodiscard]] std::string to_string(const Collection& c);

}  // namespace smslab
