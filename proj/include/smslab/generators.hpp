#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "smslab/scenario.hpp"

namespace smslab {

struct Constructed {
  Scenario scenario;
  std::optional<Rational> alpha;  // injected lift factor (abduction kinds)
};

// kind in {p73, p74, p75, p81, p82, p83, projection}. Deterministic per seed.
// Every kind except p73 uses epsilon = 0; p73 uses the largest calibration score rounded up
// (no scenario is calibrated at exactly 0 while its oracle chain strictly increases).
[[nodiscard]] Constructed construct_eps0(const std::string& kind, std::uint64_t seed);

// Upper bounds for random instances.
struct Profile {
  int questions = 4;
  int answers = 3;
  int support = 64;  // distinct vectors per table (per-step) or reachable vectors (kernel)
  int horizon = 1;
  bool kernel = false;
  bool sparse = false;  // allow near-zero and zero cells instead of weights >= 2/64
};

// Per-step SMS; every vector asks each question at most once.
[[nodiscard]] SmsSpec random_sms(const Profile& profile, std::uint64_t seed);
// Kernel SMS with declared kappa in {0, 1}: from step kappa + 1 on, every state moves only to supersets.
[[nodiscard]] SmsSpec random_backward_consistent(const Profile& profile, std::uint64_t seed);
// A single-SMS scenario with a validate check.
[[nodiscard]] Scenario random_instance(const Profile& profile, std::uint64_t seed);
// Universe (hold kernel), claimwise random E, and the scientist generated as the E-image process.
[[nodiscard]] Scenario random_embedding_instance(std::uint64_t seed);

// Precondition label prefix ("(3)") for a named hypothesis of a proposition; "" for "none".
// Accepts "(k)", "k" and the names calibration, premise, evidence, pairs, support, marginalization,
// proportionality. Throws DomainError for unknown labels.
[[nodiscard]] std::string ablation_prefix(const std::string& prop, const std::string& ablate);

struct SearchResult {
  bool found = false;
  long trials = 0;  // trials run (the found trial's index + 1 when found)
  std::optional<Scenario> scenario;
  std::optional<CheckReport> report;
};
// Samples a family of instances that keeps every hypothesis except `ablate` satisfiable and returns the
// first (lowest trial index) instance where all non-ablated hypotheses hold and the conclusion fails.
[[nodiscard]] SearchResult counterexample_search(const std::string& prop, const std::string& ablate, long trials,
                                                 std::uint64_t seed);

}  // namespace smslab
