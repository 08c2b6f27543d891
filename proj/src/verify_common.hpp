#pragma once

#include <functional>

#include "smslab/calibration.hpp"
#include "smslab/embedding.hpp"
#include "smslab/evidence.hpp"

namespace smslab::detail {

// Psi(psi(q), v) and the oracle conditional share their support for every positive reasoner answer.
[[nodiscard]] bool oracle_full_support(const Setting& st, const QuestionVector& psiq, const Question& q,
                                       const ClaimSet& s);
// Same against the universe conditional on the preimage collection.
[[nodiscard]] bool universe_full_support(const Setting& st, const EmbeddingMap& E, const QuestionVector& psiq,
                                         const Question& q, const ClaimSet& s);
// A score that cannot be evaluated counts as infinite.
[[nodiscard]] Score safe_score(const std::function<Score()>& f);
void add_embedding_precondition(CheckReport& rep, const Setting& st, const EmbeddingMap& E, const VerifyOptions& opt);

using VerifyCore = std::function<CheckReport(const Setting&, double)>;
// Runs `core` at epsilon, then (when enabled) the Psi-blend sweep with calibration gates opened.
[[nodiscard]] CheckReport run_with_sweep(const Setting& st, double epsilon, const VerifyOptions& opt,
                                         const VerifyCore& core);

}  // namespace smslab::detail
