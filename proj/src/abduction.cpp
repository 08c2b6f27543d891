#include "smslab/abduction.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "smslab/errors.hpp"
#include "verify_common.hpp"

namespace smslab {

namespace {

using namespace detail;

// P(v | q, sup, coll) on a law; ConditioningError when q is never asked there.
Rational cond_value(const Law& law, const Question& q, const Answer& v, const ClaimSet& sup,
                    const std::optional<Collection>& coll = std::nullopt) {
  Rational denom = prob_value(law, Event{sup, {q}, coll});
  if (denom == 0) throw ConditioningError({q}, sup, law.where);
  return prob_value(law, Event{with_claim(sup, Claim{q, v}), {}, coll}) / denom;
}

Rational at(const Dist& d, const AnswerVector& k) {
  auto it = d.find(k);
  return it == d.end() ? Rational(0) : it->second;
}

Rational ratio(const Rational& num, const Rational& den, const std::string& what) {
  if (den == 0) throw ConditioningError("zero conditional in " + what);
  return num / den;
}

// Sum over the explanation answer of joint(v*, y).
Rational observed_marginal(const Dist& joint, const Answer& vs) {
  Rational total = 0;
  for (const auto& [k, p] : joint)
    if (k.size() == 2 && k[0] == vs) total += p;
  return total;
}

Rational explanation_marginal(const Dist& joint, const Answer& vd) {
  Rational total = 0;
  for (const auto& [k, p] : joint)
    if (k.size() == 2 && k[1] == vd) total += p;
  return total;
}

struct Resolved {
  QuestionVector observed, explanation, both;
  Question a, b, c;  // reasoner questions predicting the observed, the explanation and both
};

std::optional<Resolved> resolve(CheckReport& rep, const Setting& st, const AbductionQuery& aq, bool need_invertible) {
  Resolved r{{aq.observed_q}, {aq.explanation_q}, {aq.observed_q, aq.explanation_q}, {}, {}, {}};
  if (need_invertible) rep.require("psi invertible", st.psi.invertible && st.psi.injective());
  std::optional<Question> a, b, c;
  try {
    a = st.psi.inverse(r.observed);
    b = st.psi.inverse(r.explanation);
    c = st.psi.inverse(r.both);
  } catch (const SmsError& e) {
    rep.require("q*, q-dagger and (q*, q-dagger) in the codomain of psi", false, e.what());
    return std::nullopt;
  }
  rep.require("q*, q-dagger and (q*, q-dagger) in the codomain of psi", a && b && c);
  if (!rep.preconditions_hold()) return std::nullopt;
  r.a = *a;
  r.b = *b;
  r.c = *c;
  return r;
}

AbductionAlpha prediction_alpha(const PredictionDistribution& F, const Resolved& r, const AbductionQuery& aq,
                                const ClaimSet& s) {
  return abduction_alpha(F.value(r.both, s), F.value(r.observed, s), F.value(r.explanation, s), aq);
}

std::vector<ClaimSet> reasoner_sets(const Setting& st, const ClaimSet& context) {
  Budget budget;
  std::set<ClaimSet> out{ClaimSet{}, context};
  for (const auto& a : st.reasoner.atoms)
    for (const auto& sub : all_subsets(a.set)) {
      budget.charge();
      out.insert(sub);
    }
  return {out.begin(), out.end()};
}

// (1) premise on the prediction distribution over every set in scope where the three pairs hold.
void premise_on_prediction(CheckReport& rep, const PredictionDistribution& F, const Resolved& r,
                           const AbductionQuery& aq, const Setting& st, const ClaimSet& context) {
  std::vector<ClaimSet> scope;
  for (const auto& s : reasoner_sets(st, context))
    if (s == context || (F.is_pair(r.a, s) && F.is_pair(r.b, s) && F.is_pair(r.c, s))) scope.push_back(s);
  Json failing = Json::array();
  std::optional<Rational> alpha_here;
  for (const auto& s : scope) {
    try {
      Rational alpha = prediction_alpha(F, r, aq, s).premise;
      if (s == context) alpha_here = alpha;
      if (alpha <= 1) failing.push_back(Json{{"C", to_string(s)}, {"alpha", to_string(alpha)}});
    } catch (const SmsError& e) {
      failing.push_back(Json{{"C", to_string(s)}, {"error", e.what()}});
    }
  }
  rep.require("(1) prediction distribution satisfies the premise", failing.empty(),
              Json{{"scope", "supplied context plus every reasoner claim set where the three pairs hold"},
                   {"scope_size", scope.size()},
                   {"failing", failing}});
  if (alpha_here) rep.details["alpha"] = to_string(*alpha_here);
}

// (3) or (6): summing the joint over explanation answers recovers the observed-answer marginal.
void marginalization(CheckReport& rep, const std::string& label, const std::function<Dist()>& joint,
                     const std::function<Dist()>& single, const Answer& vs) {
  try {
    Rational lhs = observed_marginal(joint(), vs);
    Rational rhs = at(single(), {vs});
    rep.require(label, lhs == rhs, Json{{"joint_sum", to_string(lhs)}, {"single", to_string(rhs)}});
  } catch (const SmsError& e) {
    rep.require(label, false, e.what());
  }
}

struct PairFns {
  std::function<bool(const Question&)> is_pair;
  std::function<Score(const Question&)> score;
  std::function<bool(const Question&)> support;
};

// Prediction pairs, calibration at epsilon and the full-support gate for the three reasoner questions.
void three_questions(CheckReport& rep, const Resolved& r, double epsilon, const PairFns& fns,
                     const std::string& pair_label, const std::string& calib_label) {
  Json not_pairs = Json::array(), not_calibrated = Json::array(), not_supported = Json::array();
  double max_score = 0;
  for (const auto& q : {r.a, r.b, r.c}) {
    if (!fns.is_pair(q)) {
      not_pairs.push_back(q);
      not_calibrated.push_back(q);
      continue;
    }
    Score s = safe_score([&] { return fns.score(q); });
    max_score = std::max(max_score, s.high);
    if (!(s.high <= epsilon)) not_calibrated.push_back(Json{{"q", q}, {"score_high", number_json(s.high)}});
    if (!fns.support(q)) not_supported.push_back(q);
  }
  rep.require(pair_label, not_pairs.empty(), Json{{"failing", not_pairs}});
  rep.require(calib_label, not_calibrated.empty(), Json{{"max_score", number_json(max_score)}, {"failing", not_calibrated}});
  rep.require("(5) full support for the Lipschitz gate", not_supported.empty(), Json{{"failing", not_supported}});
  rep.details["max_score"] = number_json(max_score);
}

void set_lift(CheckReport& rep, const Rational& lhs, const Rational& rhs) {
  rep.conclusion.holds = lhs > rhs;
  rep.conclusion.lhs = to_string(lhs);
  rep.conclusion.rhs = to_string(rhs);
  rep.conclusion.margin = to_string(lhs - rhs);
  rep.details["margin_float"] = to_double(lhs - rhs);
  if (rhs != 0) rep.details["lift"] = to_string(lhs / rhs);
}

void undefined_conclusion(CheckReport& rep, const SmsError& e) {
  rep.conclusion.holds = false;
  rep.conclusion.lhs = std::string("undefined: ") + e.what();
}

std::optional<Collection> preimage_or_none(const EmbeddingMap& E, const ClaimSet& s) {
  Collection pre = E.preimage(s);
  if (pre.empty()) return std::nullopt;
  return pre;
}

// Universe marginalization on preimages, for every reasoner answer where both sides are defined.
void universe_marginalization(CheckReport& rep, const std::string& label, const Setting& st, const EmbeddingMap& E,
                              const Resolved& r, const AbductionQuery& aq, const ClaimSet& context) {
  Json rows = Json::array();
  bool ok = true;
  std::optional<Answer> witness;
  try {
    for (const auto& v : st.phi2.answers) {
      auto pre_both = preimage_or_none(E, with_claim(context, Claim{r.c, v}));
      auto pre_obs = preimage_or_none(E, with_claim(context, Claim{r.a, v}));
      if (!pre_both || !pre_obs) continue;
      Dist joint, single;
      try {
        joint = cond_answers(st.oracle, r.both, Event{{}, {}, pre_both});
        single = cond_answers(st.oracle, r.observed, Event{{}, {}, pre_obs});
      } catch (const ConditioningError&) {
        continue;
      }
      Rational lhs = observed_marginal(joint, aq.observed_v), rhs = at(single, {aq.observed_v});
      rows.push_back(Json{{"v", v}, {"joint_sum", to_string(lhs)}, {"single", to_string(rhs)}});
      if (lhs != rhs && ok) {
        ok = false;
        witness = v;
      }
    }
  } catch (const SmsError& e) {
    rep.require(label, false, e.what());
    return;
  }
  Json w{{"rows", rows}};
  if (witness) w["witness_v"] = *witness;
  rep.require(label, ok, w);
}

PairFns plain_fns(const Setting& st, const Resolved& r, const ClaimSet& context) {
  return PairFns{
      [&st, context](const Question& q) { return is_prediction_pair(st, q, context).conclusion.holds; },
      [&st, context](const Question& q) { return calibration_score(st, q, context); },
      [&st, &r, context](const Question& q) {
        const QuestionVector& psiq = q == r.a ? r.observed : q == r.b ? r.explanation : r.both;
        return oracle_full_support(st, psiq, q, context);
      }};
}

PairFns embedded_fns(const Setting& st, const EmbeddingMap& E, const Resolved& r, const ClaimSet& context) {
  return PairFns{
      [&st, &E, context](const Question& q) { return is_embedded_prediction_pair(st, E, q, context).conclusion.holds; },
      [&st, &E, context](const Question& q) { return embed_calibration_score(st, E, q, context); },
      [&st, &E, &r, context](const Question& q) {
        const QuestionVector& psiq = q == r.a ? r.observed : q == r.b ? r.explanation : r.both;
        return universe_full_support(st, E, psiq, q, context);
      }};
}

CheckReport math_core(const Setting& st, const AbductionQuery& aq, const ClaimSet& context, double epsilon) {
  CheckReport rep("p81");
  auto r = resolve(rep, st, aq, true);
  if (!r) {
    rep.finish();
    return rep;
  }
  std::optional<PredictionDistribution> F;
  try {
    F.emplace(st);
    premise_on_prediction(rep, *F, *r, aq, st, context);
  } catch (const SmsError& e) {
    rep.require("(1) prediction distribution satisfies the premise", false, e.what());
  }
  PairFns fns = plain_fns(st, *r, context);
  if (F) {
    marginalization(rep, "(3) prediction distribution marginalization", [&] { return F->value(r->both, context); },
                    [&] { return F->value(r->observed, context); }, aq.observed_v);
  } else {
    rep.require("(3) prediction distribution marginalization", false, "prediction distribution undefined");
  }
  three_questions(rep, *r, epsilon, fns, "(2) prediction pairs for the three questions",
                  "(4) calibrated at epsilon for the three questions");
  marginalization(rep, "(6) oracle marginalization",
                  [&] { return cond_answers(st.oracle, r->both, Event{context, {}, std::nullopt}); },
                  [&] { return cond_answers(st.oracle, r->observed, Event{context, {}, std::nullopt}); },
                  aq.observed_v);
  try {
    Rational lhs = cond_value(st.oracle, aq.explanation_q, aq.explanation_v,
                              with_claim(context, Claim{aq.observed_q, aq.observed_v}));
    Rational rhs = cond_value(st.oracle, aq.explanation_q, aq.explanation_v, context);
    set_lift(rep, lhs, rhs);
  } catch (const SmsError& e) {
    undefined_conclusion(rep, e);
  }
  rep.details["context"] = to_string(context);
  rep.details["epsilon"] = number_json(epsilon);
  rep.finish();
  return rep;
}

CheckReport expect_core(const Setting& st, const EmbeddingMap& E, const AbductionQuery& aq, const ClaimSet& context,
                        double epsilon, const VerifyOptions& opt) {
  CheckReport rep("p82");
  auto r = resolve(rep, st, aq, true);
  if (!r) {
    rep.finish();
    return rep;
  }
  add_embedding_precondition(rep, st, E, opt);
  std::optional<PredictionDistribution> F;
  try {
    F.emplace(st, &E);
    premise_on_prediction(rep, *F, *r, aq, st, context);
  } catch (const SmsError& e) {
    rep.require("(1) prediction distribution satisfies the premise", false, e.what());
  }
  PairFns fns = embedded_fns(st, E, *r, context);
  if (F) {
    marginalization(rep, "(3) prediction distribution marginalization", [&] { return F->value(r->both, context); },
                    [&] { return F->value(r->observed, context); }, aq.observed_v);
  } else {
    rep.require("(3) prediction distribution marginalization", false, "prediction distribution undefined");
  }
  three_questions(rep, *r, epsilon, fns, "(2) embedded prediction pairs for the three questions",
                  "(4) embed-calibrated at epsilon for the three questions");
  universe_marginalization(rep, "(6) universe marginalization on preimages", st, E, *r, aq, context);

  // Sum over v of P2(v | b, extra, C) * P1(v-dagger | q-dagger, sup, E^-1[{(b, v)} u C]).
  auto expectation = [&](const ClaimSet& extra, const ClaimSet& sup) {
    Rational total = 0;
    for (const auto& [v, p] : reasoner_answers(st, r->b, set_union(context, extra))) {
      if (p == 0) continue;
      auto pre = preimage_or_none(E, with_claim(context, Claim{r->b, v}));
      if (!pre) throw ConditioningError("empty preimage for (" + r->b + ", " + v + ")");
      total += p * cond_value(st.oracle, aq.explanation_q, aq.explanation_v, sup, pre);
    }
    return total;
  };
  try {
    ClaimSet observed{Claim{aq.observed_q, aq.observed_v}};
    set_lift(rep, expectation(observed, observed), expectation({}, {}));
  } catch (const SmsError& e) {
    undefined_conclusion(rep, e);
  }
  rep.details["context"] = to_string(context);
  rep.details["epsilon"] = number_json(epsilon);
  rep.finish();
  return rep;
}

CheckReport project_core(const Setting& st, const EmbeddingMap& E, const AbductionQuery& aq,
                         const ClaimSet& universe_context, double epsilon, const VerifyOptions& opt) {
  CheckReport rep("p83");
  auto r = resolve(rep, st, aq, true);
  if (!r) {
    rep.finish();
    return rep;
  }
  rep.require("E defined at the universe context", E.defined(universe_context), to_string(universe_context));
  if (!rep.preconditions_hold()) {
    rep.finish();
    return rep;
  }
  const ClaimSet context = E.image(universe_context);
  add_embedding_precondition(rep, st, E, opt);

  // (1) one alpha > 1 for every reasoner answer where the universe conditionals are defined.
  Json rows = Json::array();
  std::optional<Rational> alpha;
  bool ok = true;
  try {
    for (const auto& v : st.phi2.answers) {
      auto pre_both = preimage_or_none(E, with_claim(context, Claim{r->c, v}));
      auto pre_obs = preimage_or_none(E, with_claim(context, Claim{r->a, v}));
      if (!pre_both || !pre_obs) continue;
      Rational lhs, base;
      try {
        lhs = cond_value(st.oracle, aq.observed_q, aq.observed_v, {Claim{aq.explanation_q, aq.explanation_v}}, pre_both);
        base = cond_value(st.oracle, aq.observed_q, aq.observed_v, {}, pre_obs);
      } catch (const ConditioningError&) {
        continue;
      }
      if (base == 0) continue;
      Rational a = lhs / base;
      rows.push_back(Json{{"v", v}, {"alpha", to_string(a)}});
      if (!alpha) alpha = a;
      if (a != *alpha || a <= 1) ok = false;
    }
    rep.require("(1) universe satisfies the premise on preimage events", ok && alpha.has_value(), rows);
  } catch (const SmsError& e) {
    rep.require("(1) universe satisfies the premise on preimage events", false, e.what());
  }
  if (alpha) rep.details["alpha"] = to_string(*alpha);

  PairFns fns = embedded_fns(st, E, *r, context);
  universe_marginalization(rep, "(3) universe marginalization on preimages", st, E, *r, aq, context);
  three_questions(rep, *r, epsilon, fns, "(2) embedded prediction pairs for the three questions",
                  "(4) embed-calibrated at epsilon for the three questions");
  std::optional<PredictionDistribution> F;
  try {
    F.emplace(st, &E);
  } catch (const SmsError& e) {
    rep.require("(6) prediction distribution marginalization", false, e.what());
  }
  if (F) {
    marginalization(rep, "(6) prediction distribution marginalization", [&] { return F->value(r->both, context); },
                    [&] { return F->value(r->observed, context); }, aq.observed_v);
    try {
      Dist joint = F->value(r->both, context);
      Rational lhs = ratio(at(joint, {aq.observed_v, aq.explanation_v}), observed_marginal(joint, aq.observed_v),
                           "the prediction distribution");
      Rational rhs = at(F->value(r->explanation, context), {aq.explanation_v});
      set_lift(rep, lhs, rhs);
    } catch (const SmsError& e) {
      undefined_conclusion(rep, e);
    }
  } else {
    rep.conclusion.holds = false;
    rep.conclusion.lhs = "undefined: prediction distribution";
  }
  rep.details["context"] = to_string(context);
  rep.details["epsilon"] = number_json(epsilon);
  rep.finish();
  return rep;
}

}  // namespace

AbductionAlpha abduction_alpha(const Law& law, const AbductionQuery& aq, const ClaimSet& s) {
  AbductionAlpha out;
  Claim observed{aq.observed_q, aq.observed_v}, explanation{aq.explanation_q, aq.explanation_v};
  Rational obs_base = cond_value(law, aq.observed_q, aq.observed_v, s);
  Rational obs_lift = cond_value(law, aq.observed_q, aq.observed_v, with_claim(s, explanation));
  Rational exp_base = cond_value(law, aq.explanation_q, aq.explanation_v, s);
  Rational exp_lift = cond_value(law, aq.explanation_q, aq.explanation_v, with_claim(s, observed));
  out.premise = ratio(obs_lift, obs_base, "the premise");
  out.implication = ratio(exp_lift, exp_base, "the implication");
  Rational both = prob_value(law, Event{s, {aq.observed_q, aq.explanation_q}, std::nullopt});
  Rational all = prob_value(law, Event{s, {}, std::nullopt});
  out.both_sure = all > 0 && both == all;
  return out;
}

AbductionAlpha abduction_alpha(const Dist& joint, const Dist& observed, const Dist& explanation,
                               const AbductionQuery& aq) {
  AbductionAlpha out;
  Rational cell = at(joint, {aq.observed_v, aq.explanation_v});
  Rational obs_given = ratio(cell, explanation_marginal(joint, aq.explanation_v), "the premise");
  Rational exp_given = ratio(cell, observed_marginal(joint, aq.observed_v), "the implication");
  out.premise = ratio(obs_given, at(observed, {aq.observed_v}), "the premise");
  out.implication = ratio(exp_given, at(explanation, {aq.explanation_v}), "the implication");
  out.both_sure = true;
  return out;
}

SmsSpec random_always_asked(std::uint64_t seed, const AbductionQuery& aq, int answers) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> weight(2, 64);
  std::set<Answer> alphabet{"0", "1"};
  for (int i = 0; i < answers; ++i) alphabet.insert(std::to_string(i));
  Table table;
  Rational total = 0;
  for (int x = 0; x < answers; ++x)
    for (int y = 0; y < answers; ++y)
      for (const char* z : {"0", "1"}) {
        Rational w = weight(rng);
        total += w;
        table.push_back(Row{{Claim{aq.observed_q, std::to_string(x)}, Claim{aq.explanation_q, std::to_string(y)},
                             Claim{"z", z}},
                            w});
      }
  for (auto& row : table) row.p /= total;
  return per_step({aq.observed_q, aq.explanation_q, "z"}, {alphabet.begin(), alphabet.end()}, table);
}

CheckReport verify_abduction_math(const Setting& st, const AbductionQuery& aq, const ClaimSet& context, double epsilon,
                                  const VerifyOptions& opt) {
  return run_with_sweep(st, epsilon, opt, [&](const Setting& s, double eps) { return math_core(s, aq, context, eps); });
}

CheckReport verify_abduction_sci_expect(const Setting& st, const EmbeddingMap& E, const AbductionQuery& aq,
                                        const ClaimSet& context, double epsilon, const VerifyOptions& opt) {
  return run_with_sweep(st, epsilon, opt,
                        [&](const Setting& s, double eps) { return expect_core(s, E, aq, context, eps, opt); });
}

CheckReport verify_abduction_sci_project(const Setting& st, const EmbeddingMap& E, const AbductionQuery& aq,
                                         const ClaimSet& universe_context, double epsilon, const VerifyOptions& opt) {
  return run_with_sweep(st, epsilon, opt, [&](const Setting& s, double eps) {
    return project_core(s, E, aq, universe_context, eps, opt);
  });
}

}  // namespace smslab
