#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "smslab/divergence.hpp"
#include "smslab/embedding_map.hpp"
#include "smslab/law.hpp"
#include "smslab/report.hpp"
#include "smslab/sms.hpp"

namespace smslab {

// Partial map from reasoner questions to oracle question vectors.
struct PsiMap {
  std::map<Question, QuestionVector> map;
  bool invertible = true;

  [[nodiscard]] const QuestionVector* at(const Question& q) const;
  [[nodiscard]] bool injective() const;
  // The unique question mapped to qs, if any.
  [[nodiscard]] std::optional<Question> inverse(const QuestionVector& qs) const;
  bool operator==(const PsiMap&) const = default;
};

// Partial map (oracle question vector, reasoner answer) -> distribution over oracle answer tuples.
struct PsiInterp {
  std::map<std::pair<QuestionVector, Answer>, Dist> table;

  [[nodiscard]] const Dist* find(const QuestionVector& qs, const Answer& v) const;
  bool operator==(const PsiInterp&) const = default;
};

// Oracle (phi1) and reasoner (phi2) with their interpretation maps, evaluated once.
struct Setting {
  SmsSpec phi1;
  SmsSpec phi2;
  PsiMap psi;
  PsiInterp Psi;
  int step = 1;          // reasoner step n
  int oracle_step = kLimit;
  DivergenceKind kind = DivergenceKind::KL;
  Law oracle;
  Law reasoner;
};

[[nodiscard]] Setting make_setting(SmsSpec phi1, SmsSpec phi2, PsiMap psi, PsiInterp Psi, int step,
                                   DivergenceKind kind = DivergenceKind::KL, int oracle_step = kLimit);

// Reasoner answers to q given s, as a map answer -> probability.
[[nodiscard]] std::map<Answer, Rational> reasoner_answers(const Setting& st, const Question& q,
                                                          const ClaimSet& s);

[[nodiscard]] CheckReport is_prediction_pair(const Setting& st, const Question& q, const ClaimSet& s);

// Score interval; a loose oracle limit gives [0, inf).
struct Score {
  double low = 0;
  double high = 0;
  [[nodiscard]] bool determinate() const { return low == high; }
};
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// "calibrated", "not calibrated" or "indeterminate at horizon".
[[nodiscard]] std::string verdict_at(const Score& s, double epsilon);

// Throws PreconditionError when (q, s) is not a prediction pair.
[[nodiscard]] Score calibration_score(const Setting& st, const Question& q, const ClaimSet& s);

struct Reduction {
  double reduction = 0;   // D[P^n(V|q,s), limit P(V|q,s)]
  double delta_score = 0; // calibration score with identity psi and delta Psi
  bool bound_holds = false;
};
// Single SMS: `step_spec` at step n against `limit_spec` at its limit (usually the same spec).
[[nodiscard]] Reduction single_sms_reduction(const SmsSpec& step_spec, const SmsSpec& limit_spec, int n,
                                             const Question& q, const ClaimSet& s,
                                             DivergenceKind kind = DivergenceKind::KL);

[[nodiscard]] CheckReport is_honest(const SmsSpec& phi, int n, const PsiMap& psi, const PsiInterp& Psi,
                                    const Question& q, const Answer& v, const ClaimSet& s);

// Single-SMS interpretation read off the SMS's own conditionals at (q, v, s) for every answer v.
[[nodiscard]] PsiInterp honest_interp(const SmsSpec& phi, int n, const PsiMap& psi, const Question& q,
                                      const ClaimSet& s);

// Reasoner's averaged prediction of the oracle. With an embedding map the pair
// conditions are the embedded ones.
class PredictionDistribution {
 public:
  explicit PredictionDistribution(const Setting& st, const EmbeddingMap* E = nullptr);

  [[nodiscard]] bool is_pair(const Question& q, const ClaimSet& s) const;
  // Unnormalized weight, proportional to P2(q, s) on prediction pairs, 0 elsewhere.
  [[nodiscard]] Rational weight(const QuestionVector& psiq, const ClaimSet& s) const;
  // Mixture over reasoner answers; ConditioningError when the weight is 0.
  [[nodiscard]] Dist value(const QuestionVector& psiq, const ClaimSet& s) const;
  [[nodiscard]] Rational value(const QuestionVector& psiq, const AnswerVector& answers, const ClaimSet& s) const;
  // F(B | psiq, beta) as a ratio of weights.
  [[nodiscard]] Rational cond_sets(const QuestionVector& psiq, const ClaimSet& extra, const ClaimSet& beta) const;

  [[nodiscard]] const Setting& setting() const { return *st_; }
  [[nodiscard]] const EmbeddingMap* embedding() const { return E_; }

 private:
  [[nodiscard]] Question question_for(const QuestionVector& psiq) const;
  const Setting* st_;
  const EmbeddingMap* E_;
};

}  // namespace smslab
