#include "verify_common.hpp"

#include "smslab/errors.hpp"

namespace smslab::detail {

bool oracle_full_support(const Setting& st, const QuestionVector& psiq, const Question& q, const ClaimSet& s) {
  try {
    Dist oracle = cond_answers(st.oracle, psiq, Event{s, {}, std::nullopt});
    for (const auto& [v, p] : reasoner_answers(st, q, s))
      if (p > 0 && !full_support(*st.Psi.find(psiq, v), oracle)) return false;
    return true;
  } catch (const SmsError&) {
    return false;
  }
}

bool universe_full_support(const Setting& st, const EmbeddingMap& E, const QuestionVector& psiq, const Question& q,
                           const ClaimSet& s) {
  try {
    for (const auto& [v, p] : reasoner_answers(st, q, s))
      if (p > 0 && !full_support(*st.Psi.find(psiq, v), universe_conditional(st, E, q, v, s))) return false;
    return true;
  } catch (const SmsError&) {
    return false;
  }
}

Score safe_score(const std::function<Score()>& f) {
  try {
    return f();
  } catch (const SmsError&) {
    return Score{kInf, kInf};
  }
}

void add_embedding_precondition(CheckReport& rep, const Setting& st, const EmbeddingMap& E, const VerifyOptions& opt) {
  if (!opt.embed_check) {
    rep.details["embedding_identity"] = "not checked";
    return;
  }
  auto emb = verify_embedding(st.oracle, st.reasoner, E);
  rep.require("embedding identity", emb.verdict == Verdict::Verified, Json{{"max_residual", emb.details["max_residual"]}});
}


CheckReport run_with_sweep(const Setting& st, double epsilon, const VerifyOptions& opt, const VerifyCore& core) {
  CheckReport rep = core(st, epsilon);
  if (opt.sweep) {
    auto eval = [&](const Setting& s) -> std::optional<double> {
      CheckReport r = core(s, kInf);
      if (r.verdict != Verdict::Verified) return std::nullopt;
      return r.details.contains("max_score") ? number_from_json(r.details["max_score"]) : 0.0;
    };
    rep.details["epsilon_sweep"] = to_json(epsilon_sweep(st, eval, opt.sweep_steps));
  }
  return rep;
}

}  // namespace smslab::detail
