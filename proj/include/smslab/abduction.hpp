#pragma once

#include <cstdint>

#include "smslab/calibration.hpp"
#include "smslab/embedding.hpp"
#include "smslab/evidence.hpp"
#include "smslab/law.hpp"
#include "smslab/report.hpp"

namespace smslab {

// The observed claim (q*, v*) and the candidate explanation (q-dagger, v-dagger).
struct AbductionQuery {
  Question observed_q;
  Answer observed_v;
  Question explanation_q;
  Answer explanation_v;
};

struct AbductionAlpha {
  Rational premise;      // P(v* | q*, (q-dagger, v-dagger), C) / P(v* | q*, C)
  Rational implication;  // P(v-dagger | q-dagger, (q*, v*), C) / P(v-dagger | q-dagger, C)
  bool both_sure = false;  // both questions asked with probability 1 given C
};

// Conditionals read off a law. ConditioningError on any zero conditional.
[[nodiscard]] AbductionAlpha abduction_alpha(const Law& law, const AbductionQuery& aq, const ClaimSet& s);
// From a joint over (observed, explanation) answer pairs and the two single-question distributions.
[[nodiscard]] AbductionAlpha abduction_alpha(const Dist& joint, const Dist& observed, const Dist& explanation,
                                             const AbductionQuery& aq);

// One-step SMS whose every output answers both questions of `aq` once, plus a context claim ("z", 0|1).
// Answers of both questions range over `answers` values "0".."answers-1"; masses are positive.
[[nodiscard]] SmsSpec random_always_asked(std::uint64_t seed, const AbductionQuery& aq, int answers = 3);

// Premise on the prediction distribution, three prediction pairs at `context`, both marginalization
// hypotheses, calibration and the full-support gate; conclusion is the oracle implication.
// details.lift is the oracle lift and details.alpha the prediction-distribution premise factor at `context`.
[[nodiscard]] CheckReport verify_abduction_math(const Setting& st, const AbductionQuery& aq, const ClaimSet& context,
                                                double epsilon, const VerifyOptions& opt = {});
// Embedded analog; the conclusion compares the two expectations over the reasoner's answers.
[[nodiscard]] CheckReport verify_abduction_sci_expect(const Setting& st, const EmbeddingMap& E, const AbductionQuery& aq,
                                                      const ClaimSet& context, double epsilon,
                                                      const VerifyOptions& opt = {});
// `universe_context` is a universe claim set; hypotheses and conclusion use its image.
[[nodiscard]] CheckReport verify_abduction_sci_project(const Setting& st, const EmbeddingMap& E,
                                                       const AbductionQuery& aq, const ClaimSet& universe_context,
                                                       double epsilon, const VerifyOptions& opt = {});

}  // namespace smslab
