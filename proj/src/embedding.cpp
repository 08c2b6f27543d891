#include "smslab/embedding.hpp"

#include <algorithm>
#include <set>

#include "smslab/errors.hpp"

namespace smslab {

namespace {

Rational distance_to(const Rational& x, const Bracket& b) {
  if (x < b.lower) return b.lower - x;
  if (x > b.upper) return x - b.upper;
  return 0;
}

ClaimSet augment(const ClaimSet& s, const QuestionVector& qs, const AnswerVector& as) {
  ClaimSet out = s;
  for (std::size_t i = 0; i < qs.size(); ++i) out.insert(Claim{qs[i], as[i]});
  return out;
}

Collection augment(const Collection& c, const QuestionVector& qs, const AnswerVector& as) {
  Collection out;
  for (const auto& s : c) out.insert(augment(s, qs, as));
  return out;
}

std::vector<AnswerVector> all_tuples(const std::vector<Answer>& alphabet, std::size_t m) {
  std::vector<AnswerVector> out{AnswerVector{}};
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<AnswerVector> next;
    for (const auto& t : out)
      for (const auto& a : alphabet) {
        auto u = t;
        u.push_back(a);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

CheckReport verify_embedding(const Law& universe, const Law& scientist, const EmbeddingMap& E) {
  CheckReport rep("embedding");
  rep.require("scientist law exact", scientist.exact);
  std::set<ClaimSet> targets;
  Budget budget;
  for (const auto& a : scientist.atoms)
    for (const auto& sub : all_subsets(a.set)) {
      budget.charge();
      if (!sub.empty()) targets.insert(sub);
    }
  for (const auto& [from, to] : E.table())
    if (!to.empty()) targets.insert(to);

  rep.conclusion.holds = true;
  Rational worst = 0;
  Json residuals = Json::array();
  Json failures = Json::array();
  for (const auto& y : targets) {
    Collection pre = E.preimage(y);
    Bracket lhs = pre.empty() ? Bracket{0, 0} : prob(universe, Event{{}, {}, pre});
    Rational rhs = prob_value(scientist, Event{y, {}, std::nullopt});
    Rational r = distance_to(rhs, lhs);
    worst = std::max(worst, r);
    Json row{{"set", to_string(y)},
             {"universe", Json{{"lower", to_string(lhs.lower)}, {"upper", to_string(lhs.upper)}}},
             {"scientist", to_string(rhs)},
             {"residual", to_string(r)}};
    residuals.push_back(row);
    if (r != 0) {
      rep.conclusion.holds = false;
      if (pre.empty() && rhs > 0) row["reason"] = "empty preimage";
      failures.push_back(row);
    }
  }
  rep.conclusion.lhs = failures;
  rep.conclusion.margin = to_string(worst);
  rep.details["residuals"] = residuals;
  rep.details["max_residual"] = to_string(worst);
  rep.details["max_residual_float"] = to_double(worst);
  rep.finish();
  return rep;
}

SmsSpec image_process(const Law& universe, const EmbeddingMap& E, int horizon) {
  if (!universe.exact) throw IndeterminateError("universe limit is not determined at the horizon");
  std::map<ClaimSet, Rational> images;
  for (const auto& a : universe.atoms) {
    const ClaimSet& img = E.image(a.set);
    if (img.empty()) throw DomainError("universe set " + to_string(a.set) + " has an empty image");
    images[img] += a.mass;
  }
  std::set<Question> qs;
  std::set<Answer> as;
  Table table;
  for (const auto& [img, p] : images) {
    ClaimVector v(img.begin(), img.end());
    for (const auto& c : v) {
      qs.insert(c.question);
      as.insert(c.answer);
    }
    table.push_back(Row{v, p});
  }
  SmsSpec spec;
  spec.questions.assign(qs.begin(), qs.end());
  spec.answers.assign(as.begin(), as.end());
  spec.horizon = horizon;
  spec.mode = SmsMode::PerStep;
  spec.steps.assign(horizon, table);
  return spec;
}

CheckReport is_embedded_prediction_pair(const Setting& st, const EmbeddingMap& E, const Question& q,
                                        const ClaimSet& s, const std::optional<Answer>& v) {
  CheckReport rep(v ? "embedded-prediction-triple" : "embedded-prediction-pair");
  rep.conclusion.holds = true;
  auto cond = [&](const std::string& label, bool holds, Json witness = nullptr) {
    if (!rep.details.contains("conditions")) rep.details["conditions"] = Json::array();
    rep.details["conditions"].push_back(Json{{"label", label}, {"holds", holds}, {"witness", witness}});
    if (!holds) rep.conclusion.holds = false;
  };
  Rational mass = prob_value(st.reasoner, Event{s, {q}, std::nullopt});
  cond("(1) reasoner conditional defined", mass > 0, Json{{"P2(q,C)", to_string(mass)}});
  const QuestionVector* psiq = st.psi.at(q);
  cond("(2) q in dom psi", psiq != nullptr);
  if (mass > 0 && psiq) {
    auto answers = reasoner_answers(st, q, s);
    if (v && (!answers.count(*v) || answers.at(*v) == 0)) cond("answer has positive probability", false, *v);
    Json missing = Json::array(), undefined = Json::array();
    for (const auto& [a, p] : answers) {
      if (p == 0 || (v && a != *v)) continue;
      if (!st.Psi.find(*psiq, a)) missing.push_back(a);
      Collection pre = E.preimage(with_claim(s, Claim{q, a}));
      Bracket b = pre.empty() ? Bracket{0, 0} : prob(st.oracle, Event{{}, *psiq, pre});
      if (b.lower <= 0)
        undefined.push_back(Json{{"v", a}, {"preimage_size", pre.size()}, {"upper", to_string(b.upper)}});
    }
    cond("(3) Psi defined for every positive answer", missing.empty(), Json{{"missing", missing}});
    cond("(4) universe conditional on the preimage defined", undefined.empty(), Json{{"failing", undefined}});
  } else {
    cond("(3) Psi defined for every positive answer", false, "not evaluable");
    cond("(4) universe conditional on the preimage defined", false, "not evaluable");
  }
  rep.details["q"] = q;
  rep.details["C"] = to_string(s);
  if (v) rep.details["v"] = *v;
  rep.finish();
  return rep;
}

Dist universe_conditional(const Setting& st, const EmbeddingMap& E, const Question& q, const Answer& v,
                          const ClaimSet& s) {
  const QuestionVector* psiq = st.psi.at(q);
  if (!psiq) throw DomainError(q + " not in dom psi");
  Collection pre = E.preimage(with_claim(s, Claim{q, v}));
  if (pre.empty())
    throw ConditioningError("zero-probability conditioning event: empty preimage of " +
                            to_string(with_claim(s, Claim{q, v})));
  return cond_answers(st.oracle, *psiq, Event{{}, {}, pre});
}

Score embed_calibration_score(const Setting& st, const EmbeddingMap& E, const Question& q, const ClaimSet& s) {
  if (!is_embedded_prediction_pair(st, E, q, s).conclusion.holds)
    throw PreconditionError("(" + q + ", " + to_string(s) + ") is not an embedded prediction pair");
  if (!st.oracle.exact) return Score{0, kInf};
  const QuestionVector& psiq = *st.psi.at(q);
  double total = 0;
  for (const auto& [v, p] : reasoner_answers(st, q, s)) {
    if (p == 0) continue;
    total += to_double(p) * divergence(*st.Psi.find(psiq, v), universe_conditional(st, E, q, v, s), st.kind);
  }
  return Score{total, total};
}

CheckReport is_discriminating(const Setting& st, const EmbeddingMap& E, const Question& q, const ClaimSet& s) {
  CheckReport rep("discriminating");
  bool pair = is_embedded_prediction_pair(st, E, q, s).conclusion.holds;
  rep.require("embedded prediction pair", pair);
  if (!pair) {
    rep.finish();
    return rep;
  }
  const QuestionVector& psiq = *st.psi.at(q);
  rep.conclusion.holds = true;
  Json checked = Json::array();
  for (const auto& [v, p] : reasoner_answers(st, q, s)) {
    if (p == 0) continue;
    Collection base = E.preimage(with_claim(s, Claim{q, v}));
    for (const auto& [tuple, r] : universe_conditional(st, E, q, v, s)) {
      if (r == 0) continue;
      Collection augmented = augment(base, psiq, tuple);
      Collection round_trip = E.preimage(E.image(augmented));
      bool same = round_trip == augmented;
      Json row{{"v", v}, {"outcome", tuple}, {"holds", same}};
      if (!same) {
        rep.conclusion.holds = false;
        Json extra = Json::array();
        for (const auto& x : round_trip)
          if (!augmented.count(x)) extra.push_back(to_string(x));
        row["collapsed_with"] = extra;
        rep.conclusion.lhs = row;
      }
      checked.push_back(row);
    }
  }
  rep.details["triples"] = checked;
  rep.finish();
  return rep;
}

CheckReport check_projection(const Setting& st, const EmbeddingMap& E, const Question& q, const ClaimSet& s) {
  CheckReport rep("projection");
  bool pair = is_embedded_prediction_pair(st, E, q, s).conclusion.holds;
  rep.require("embedded prediction pair", pair);
  if (!pair) {
    rep.finish();
    return rep;
  }
  Score score = embed_calibration_score(st, E, q, s);
  rep.require("embed-calibrated at epsilon 0", score.high == 0, Json{{"score_low", number_json(score.low)}, {"score_high", number_json(score.high)}});
  auto disc = is_discriminating(st, E, q, s);
  rep.require("discriminating", disc.verdict == Verdict::Verified, disc.conclusion.lhs);
  if (!rep.preconditions_hold()) {
    rep.finish();
    return rep;
  }
  const QuestionVector& psiq = *st.psi.at(q);
  auto tuples = all_tuples(st.phi1.answers, psiq.size());
  rep.conclusion.holds = true;
  Json rows = Json::array();
  for (const auto& [v, p] : reasoner_answers(st, q, s)) {
    if (p == 0) continue;
    Collection base = E.preimage(with_claim(s, Claim{q, v}));
    std::map<AnswerVector, Rational> numer;
    Rational denom = 0;
    for (const auto& t : tuples) {
      Collection images;
      for (const auto& member : augment(base, psiq, t))
        if (E.defined(member)) images.insert(E.image(member));
      Rational value = images.empty() ? Rational(0) : prob_value(st.reasoner, Event{{}, {}, images});
      numer[t] = value;
      denom += value;
    }
    const Dist& interp = *st.Psi.find(psiq, v);
    for (const auto& t : tuples) {
      Rational lhs = interp.count(t) ? interp.at(t) : Rational(0);
      Rational rhs = denom == 0 ? Rational(0) : numer[t] / denom;
      bool same = lhs == rhs;
      if (!same) rep.conclusion.holds = false;
      if (lhs != 0 || rhs != 0 || !same)
        rows.push_back(Json{{"v", v}, {"outcome", t}, {"Psi", to_string(lhs)}, {"image_ratio", to_string(rhs)}, {"holds", same}});
    }
  }
  rep.conclusion.lhs = rows;
  rep.finish();
  return rep;
}

}  // namespace smslab
