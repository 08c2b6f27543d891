#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "smslab/calibration.hpp"
#include "smslab/embedding.hpp"
#include "smslab/law.hpp"
#include "smslab/report.hpp"

namespace smslab {

// A distribution seen through one target claim (q, v*).
class EvidenceModel {
 public:
  virtual ~EvidenceModel() = default;
  // P(v* | q, C); ConditioningError when P(q, C) = 0.
  [[nodiscard]] virtual Rational target(const ClaimSet& c) const = 0;
  // P(q, C) up to a constant factor shared by all C.
  [[nodiscard]] virtual Rational mass(const ClaimSet& c) const = 0;
};

// Conditionals of a law (step or limit) for question q and answer v*.
class LawEvidence final : public EvidenceModel {
 public:
  LawEvidence(const Law& law, Question q, Answer target);
  [[nodiscard]] Rational target(const ClaimSet& c) const override;
  [[nodiscard]] Rational mass(const ClaimSet& c) const override;

 private:
  const Law* law_;
  Question q_;
  Answer v_;
};

// Prediction distribution values for the oracle question vector psiq (length 1) and answer v*.
class PredictionEvidence final : public EvidenceModel {
 public:
  PredictionEvidence(const PredictionDistribution& F, QuestionVector psiq, Answer target);
  [[nodiscard]] Rational target(const ClaimSet& c) const override;
  [[nodiscard]] Rational mass(const ClaimSet& c) const override;

 private:
  const PredictionDistribution* F_;
  QuestionVector psiq_;
  Answer v_;
  mutable std::map<ClaimSet, Rational> mass_cache_;
  mutable std::map<ClaimSet, Rational> target_cache_;
};

struct EvidenceScenario {
  ClaimSet beta;
  std::vector<ClaimSet> paths;  // B(1..N), overlap allowed
};

// beta u B(1) u ... u B(i)
[[nodiscard]] ClaimSet cumulative(const EvidenceScenario& scn, std::size_t i);

[[nodiscard]] CheckReport is_evidence_collection(const EvidenceModel& m, const EvidenceScenario& scn);
[[nodiscard]] CheckReport is_nonthwarting(const EvidenceModel& m, const EvidenceScenario& scn);
// Per-path lift and non-thwarting as preconditions, the cumulative chain as conclusion,
// with the three ratio factors of the chain step reported for every i >= 2.
[[nodiscard]] CheckReport derive_monotone(const EvidenceModel& m, const EvidenceScenario& scn);

struct VerifyOptions {
  bool sweep = true;
  int sweep_steps = 10;
  bool embed_check = true;  // re-verify the embedding identity where an embedding map is used
};

// Largest score at which every non-calibration hypothesis and the conclusion still hold, found by
// bisecting t in Psi_t = (1 - t) Psi + t * uniform(supp Psi).
struct SweepResult {
  double t = 0;
  double epsilon = 0;
  bool holds_at_zero = false;
  bool holds_throughout = false;
};
[[nodiscard]] PsiInterp blend_with_uniform(const PsiInterp& Psi, const Rational& t);
[[nodiscard]] SweepResult epsilon_sweep(const Setting& st,
                                        const std::function<std::optional<double>(const Setting&)>& eval,
                                        int steps);
[[nodiscard]] Json to_json(const SweepResult& s);

[[nodiscard]] CheckReport verify_evidence_math(const Setting& st, const Question& q, const EvidenceScenario& scn,
                                               const Answer& target, double epsilon,
                                               const VerifyOptions& opt = {});
[[nodiscard]] CheckReport verify_evidence_sci(const Setting& st, const EmbeddingMap& E, const Question& q,
                                              const EvidenceScenario& scn, const Answer& target, double epsilon,
                                              const VerifyOptions& opt = {});
// Paths and beta are universe claim sets here.
[[nodiscard]] CheckReport verify_evidence_sci_flipped(const Setting& st, const EmbeddingMap& E, const Question& q,
                                                      const EvidenceScenario& scn, const Answer& target,
                                                      double epsilon, const VerifyOptions& opt = {});

}  // namespace smslab
