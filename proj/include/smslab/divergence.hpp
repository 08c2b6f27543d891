#pragma once

#include <cstdint>
#include <string>

#include "smslab/law.hpp"
#include "smslab/report.hpp"

namespace smslab {

enum class DivergenceKind { KL, TV, JS };

[[nodiscard]] std::string to_string(DivergenceKind k);
// Accepts "kl", "tv"/"total-variation", "js"/"jensen-shannon".
[[nodiscard]] DivergenceKind divergence_from_string(const std::string& s);

// D[p, r]. Both must be normalized answer-tuple distributions of one arity.
// Returns exactly 0 when p == r. Throws SupportError (kl, supp p not in supp r)
// and DomainError (tuple arity mismatch or unnormalized input).
[[nodiscard]] double divergence(const Dist& p, const Dist& r, DivergenceKind kind);

[[nodiscard]] CheckReport check_convexity(DivergenceKind kind, int trials, std::uint64_t seed);

// Both distributions are positive on the union of their supports.
[[nodiscard]] bool full_support(const Dist& p, const Dist& r);

}  // namespace smslab
