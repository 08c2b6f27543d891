#pragma once

#include <optional>

#include "smslab/calibration.hpp"
#include "smslab/embedding_map.hpp"
#include "smslab/law.hpp"
#include "smslab/report.hpp"

namespace smslab {

// Checks limit P1(E^-1[Y]) = P2^n(Y) for every non-empty Y the scientist can emit
// (subsets of its support sets) and every non-empty image in the table.
// details.max_residual holds the largest distance of P2^n(Y) from the P1 bracket.
[[nodiscard]] CheckReport verify_embedding(const Law& universe, const Law& scientist, const EmbeddingMap& E);

// Per-step scientist spec emitting E(U) for each universe limit set U, with the same table at steps 1..horizon.
[[nodiscard]] SmsSpec image_process(const Law& universe, const EmbeddingMap& E, int horizon = 1);

// Embedded prediction pair; with `v` set, the triple form for that answer only.
[[nodiscard]] CheckReport is_embedded_prediction_pair(const Setting& st, const EmbeddingMap& E, const Question& q,
                                                      const ClaimSet& s,
                                                      const std::optional<Answer>& v = std::nullopt);

// Universe conditional over psi(q) answers given E^-1[{(q,v)} u s].
[[nodiscard]] Dist universe_conditional(const Setting& st, const EmbeddingMap& E, const Question& q,
                                        const Answer& v, const ClaimSet& s);

// Throws PreconditionError when (q, s) is not an embedded prediction pair.
[[nodiscard]] Score embed_calibration_score(const Setting& st, const EmbeddingMap& E, const Question& q,
                                            const ClaimSet& s);

[[nodiscard]] CheckReport is_discriminating(const Setting& st, const EmbeddingMap& E, const Question& q,
                                            const ClaimSet& s);

[[nodiscard]] CheckReport check_projection(const Setting& st, const EmbeddingMap& E, const Question& q,
                                           const ClaimSet& s);

}  // namespace smslab
