#include "smslab/claims.hpp"

#include <algorithm>

namespace smslab {

ClaimSet unorder(const ClaimVector& v) { return ClaimSet(v.begin(), v.end()); }

bool is_subset(const ClaimSet& small, const ClaimSet& big) {
  if (small.size() > big.size()) return false;
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

ClaimSet set_union(const ClaimSet& a, const ClaimSet& b) {
  ClaimSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

ClaimSet with_claim(ClaimSet s, const Claim& c) {
  s.insert(c);
  return s;
}

bool asks(const ClaimSet& s, const Question& q) {
  auto it = s.lower_bound(Claim{q, ""});
  return it != s.end() && it->question == q;
}

std::vector<Answer> answers_to(const ClaimSet& s, const Question& q) {
  std::vector<Answer> out;
  for (auto it = s.lower_bound(Claim{q, ""}); it != s.end() && it->question == q; ++it)
    out.push_back(it->answer);
  return out;
}

std::vector<ClaimSet> all_subsets(const ClaimSet& s) {
  std::vector<Claim> items(s.begin(), s.end());
  const std::size_t n = items.size();
  std::vector<ClaimSet> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    ClaimSet sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) sub.insert(items[i]);
    out.push_back(std::move(sub));
  }
  return out;
}

std::string to_string(const Claim& c) { return "(" + c.question + "," + c.answer + ")"; }

std::string to_string(const ClaimSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& c : s) {
    if (!first) out += ",";
    out += to_string(c);
    first = false;
  }
  return out + "}";
}

std::string to_string(const ClaimVector& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += to_string(v[i]);
  }
  return out + "]";
}

std::string to_string(const QuestionVector& qs) {
  std::string out = "[";
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (i) out += ",";
    out += qs[i];
  }
  return out + "]";
}

std::string to_string(const Collection& c) {
  std::string out = "{";
  bool first = true;
  for (const auto& s : c) {
    if (!first) out += ",";
    out += to_string(s);
    first = false;
  }
  return out + "}";
}

}  // namespace smslab
