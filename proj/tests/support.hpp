#pragma once

// Test helpers. The oracle functions below recompute probabilities from the raw tables by
// trajectory enumeration, without going through the library's law or event code.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smslab/scenario.hpp"

namespace testsupport {

using namespace smslab;

inline std::string fixture_path(const std::string& name) { return std::string(SMSLAB_FIXTURE_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Scenario load_fixture(const std::string& name) { return parse_scenario(read_file(fixture_path(name))); }

inline Claim cl(const std::string& q, const std::string& a) { return Claim{q, a}; }

// Step-n law of the unordered output, by explicit trajectory enumeration.
inline std::map<std::set<Claim>, Rational> oracle_step(const SmsSpec& spec, int n) {
  std::map<std::set<Claim>, Rational> out;
  if (spec.mode == SmsMode::PerStep) {
    for (const auto& row : spec.steps.at(n - 1)) {
      std::set<Claim> u(row.vector.begin(), row.vector.end());
      out[u] += row.p;
    }
    return out;
  }
  std::map<ClaimVector, Rational> frontier;
  for (const auto& row : spec.init) frontier[row.vector] += row.p;
  for (int j = 2; j <= n; ++j) {
    std::map<ClaimVector, Rational> next;
    for (const auto& [v, w] : frontier) {
      if (w == 0) continue;
      for (const auto& row : spec.kernel.at(v)) next[row.vector] += w * row.p;
    }
    frontier = next;
  }
  for (const auto& [v, w] : frontier) {
    std::set<Claim> u(v.begin(), v.end());
    out[u] += w;
  }
  return out;
}

inline bool contains_all(const std::set<Claim>& big, const std::set<Claim>& small) {
  for (const auto& c : small)
    if (!big.count(c)) return false;
  return true;
}

inline bool asks_question(const std::set<Claim>& u, const std::string& q) {
  for (const auto& c : u)
    if (c.question == q) return true;
  return false;
}

inline Rational oracle_superset(const std::map<std::set<Claim>, Rational>& law, const std::set<Claim>& s) {
  Rational total = 0;
  for (const auto& [u, w] : law)
    if (contains_all(u, s)) total += w;
  return total;
}

inline Rational oracle_exact(const std::map<std::set<Claim>, Rational>& law, const std::set<Claim>& s) {
  auto it = law.find(s);
  return it == law.end() ? Rational(0) : it->second;
}

// P(answer of q = a | q asked, s) from a step law.
inline Rational oracle_cond(const std::map<std::set<Claim>, Rational>& law, const std::string& q,
                            const std::string& a, const std::set<Claim>& s) {
  Rational num = 0, den = 0;
  for (const auto& [u, w] : law) {
    if (!contains_all(u, s) || !asks_question(u, q)) continue;
    den += w;
    if (u.count(Claim{q, a})) num += w;
  }
  return num / den;
}

// Every subset of every support set of a law.
inline std::set<std::set<Claim>> support_closure(const std::map<std::set<Claim>, Rational>& law) {
  std::set<std::set<Claim>> out;
  for (const auto& [u, w] : law) {
    if (w == 0) continue;
    std::vector<Claim> items(u.begin(), u.end());
    for (unsigned mask = 0; mask < (1u << items.size()); ++mask) {
      std::set<Claim> sub;
      for (std::size_t i = 0; i < items.size(); ++i)
        if (mask >> i & 1) sub.insert(items[i]);
      out.insert(sub);
    }
  }
  return out;
}

}  // namespace testsupport
