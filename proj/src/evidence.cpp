#include "smslab/evidence.hpp"

#include <algorithm>
#include <set>

#include "smslab/errors.hpp"
#include "verify_common.hpp"

namespace smslab {

LawEvidence::LawEvidence(const Law& law, Question q, Answer target)
    : law_(&law), q_(std::move(q)), v_(std::move(target)) {}

Rational LawEvidence::mass(const ClaimSet& c) const { return prob_value(*law_, Event{c, {q_}, std::nullopt}); }

Rational LawEvidence::target(const ClaimSet& c) const {
  Rational m = mass(c);
  if (m == 0) throw ConditioningError({q_}, c, law_->where);
  return prob_value(*law_, Event{with_claim(c, Claim{q_, v_}), {}, std::nullopt}) / m;
}

PredictionEvidence::PredictionEvidence(const PredictionDistribution& F, QuestionVector psiq, Answer target)
    : F_(&F), psiq_(std::move(psiq)), v_(std::move(target)) {}

Rational PredictionEvidence::mass(const ClaimSet& c) const {
  auto it = mass_cache_.find(c);
  if (it == mass_cache_.end()) it = mass_cache_.emplace(c, F_->weight(psiq_, c)).first;
  return it->second;
}

Rational PredictionEvidence::target(const ClaimSet& c) const {
  auto it = target_cache_.find(c);
  if (it != target_cache_.end()) return it->second;
  if (mass(c) == 0)
    throw ConditioningError("zero-probability conditioning event in the prediction distribution at " + to_string(c));
  Rational t = F_->value(psiq_, AnswerVector{v_}, c);
  target_cache_.emplace(c, t);
  return t;
}

ClaimSet cumulative(const EvidenceScenario& scn, std::size_t i) {
  ClaimSet out = scn.beta;
  for (std::size_t k = 0; k < i && k < scn.paths.size(); ++k) out.insert(scn.paths[k].begin(), scn.paths[k].end());
  return out;
}

namespace {

// Every conditional the definitions mention must be positive.
bool nonzero_conditionals(const EvidenceModel& m, const EvidenceScenario& scn, Json& witness) {
  std::vector<std::pair<std::string, ClaimSet>> sets{{"beta", scn.beta}};
  for (std::size_t i = 1; i <= scn.paths.size(); ++i) {
    sets.emplace_back("beta,B(" + std::to_string(i) + ")", set_union(scn.beta, scn.paths[i - 1]));
    sets.emplace_back("beta,B(1.." + std::to_string(i) + ")", cumulative(scn, i));
  }
  for (const auto& [label, s] : sets) {
    try {
      if (m.mass(s) == 0 || m.target(s) == 0) {
        witness = Json{{"at", label}, {"set", to_string(s)}};
        return false;
      }
    } catch (const ConditioningError& e) {
      witness = Json{{"at", label}, {"set", to_string(s)}, {"error", e.what()}};
      return false;
    }
  }
  return true;
}

struct Conditionals {
  const EvidenceModel& m;
  const ClaimSet& beta;
  // P(X | q, beta)
  Rational given_q(const ClaimSet& with_x) const { return m.mass(with_x) / m.mass(beta); }
  // P(X | (q, v*), beta)
  Rational given_target(const ClaimSet& with_x) const {
    return m.target(with_x) * m.mass(with_x) / (m.target(beta) * m.mass(beta));
  }
};

bool lifts_hold(const EvidenceModel& m, const EvidenceScenario& scn, Json& rows) {
  bool ok = true;
  Rational base = m.target(scn.beta);
  for (std::size_t i = 1; i <= scn.paths.size(); ++i) {
    Rational t = m.target(set_union(scn.beta, scn.paths[i - 1]));
    bool holds = t > base;
    ok = ok && holds;
    rows.push_back(Json{{"i", i}, {"with_path", to_string(t)}, {"base", to_string(base)}, {"holds", holds}});
  }
  return ok;
}

bool chain_holds(const EvidenceModel& m, const EvidenceScenario& scn, Json& rows, Rational* margin = nullptr) {
  bool ok = true;
  std::optional<Rational> worst;
  for (std::size_t i = 1; i <= scn.paths.size(); ++i) {
    Rational now = m.target(cumulative(scn, i));
    Rational before = m.target(cumulative(scn, i - 1));
    bool holds = now > before;
    ok = ok && holds;
    if (!worst || now - before < *worst) worst = now - before;
    rows.push_back(Json{{"i", i}, {"through_i", to_string(now)}, {"through_i_minus_1", to_string(before)}, {"holds", holds}});
  }
  if (margin && worst) *margin = *worst;
  return ok;
}

bool nonthwarting_holds(const EvidenceModel& m, const EvidenceScenario& scn, Json& rows) {
  Conditionals c{m, scn.beta};
  bool ok = true;
  for (std::size_t i = 2; i <= scn.paths.size(); ++i) {
    ClaimSet all = cumulative(scn, i), prev = cumulative(scn, i - 1), one = set_union(scn.beta, scn.paths[i - 1]);
    Rational lhs = c.given_target(all) / (c.given_target(prev) * c.given_target(one));
    Rational rhs = c.given_q(all) / (c.given_q(prev) * c.given_q(one));
    bool holds = lhs >= rhs;
    ok = ok && holds;
    rows.push_back(Json{{"i", i}, {"given_target", to_string(lhs)}, {"given_question", to_string(rhs)}, {"holds", holds}});
  }
  return ok;
}

}  // namespace

CheckReport is_evidence_collection(const EvidenceModel& m, const EvidenceScenario& scn) {
  CheckReport rep("evidence-collection");
  rep.require("at least one path", !scn.paths.empty());
  Json w;
  rep.require("nonzero conditionals", !scn.paths.empty() && nonzero_conditionals(m, scn, w), w);
  if (!rep.preconditions_hold()) {
    rep.finish();
    return rep;
  }
  Json lifts = Json::array(), chain = Json::array();
  bool a = lifts_hold(m, scn, lifts);
  bool b = chain_holds(m, scn, chain);
  rep.conclusion.holds = a && b;
  rep.conclusion.lhs = Json{{"per_path_lift", lifts}, {"cumulative_chain", chain}};
  rep.finish();
  return rep;
}

CheckReport is_nonthwarting(const EvidenceModel& m, const EvidenceScenario& scn) {
  CheckReport rep("nonthwarting");
  rep.require("at least one path", !scn.paths.empty());
  Json w;
  rep.require("nonzero conditionals", !scn.paths.empty() && nonzero_conditionals(m, scn, w), w);
  if (!rep.preconditions_hold()) {
    rep.finish();
    return rep;
  }
  Json rows = Json::array();
  rep.conclusion.holds = nonthwarting_holds(m, scn, rows);
  rep.conclusion.lhs = rows;
  rep.finish();
  return rep;
}

CheckReport derive_monotone(const EvidenceModel& m, const EvidenceScenario& scn) {
  CheckReport rep("derive-monotone");
  rep.require("at least one path", !scn.paths.empty());
  Json w;
  bool nz = !scn.paths.empty() && nonzero_conditionals(m, scn, w);
  rep.require("nonzero conditionals", nz, w);
  if (!nz) {
    rep.finish();
    return rep;
  }
  Json lifts = Json::array(), thwart = Json::array();
  rep.require("per-path lift", lifts_hold(m, scn, lifts), lifts);
  rep.require("non-thwarting", nonthwarting_holds(m, scn, thwart), thwart);

  Conditionals c{m, scn.beta};
  Json factors = Json::array();
  bool identity = true;
  for (std::size_t i = 2; i <= scn.paths.size(); ++i) {
    ClaimSet all = cumulative(scn, i), prev = cumulative(scn, i - 1), one = set_union(scn.beta, scn.paths[i - 1]);
    Rational f1 = m.target(one) / m.target(scn.beta);
    Rational f2 = c.given_q(one) * c.given_q(prev) / c.given_q(all);
    Rational f3 = c.given_target(all) / (c.given_target(one) * c.given_target(prev));
    Rational ratio = m.target(all) / m.target(prev);
    bool same = f1 * f2 * f3 == ratio;
    identity = identity && same;
    factors.push_back(Json{{"i", i},
                           {"single_path_lift", to_string(f1)},
                           {"question_factor", to_string(f2)},
                           {"target_factor", to_string(f3)},
                           {"product", to_string(f1 * f2 * f3)},
                           {"chain_ratio", to_string(ratio)},
                           {"identity", same}});
  }
  Json chain = Json::array();
  rep.conclusion.holds = chain_holds(m, scn, chain);
  rep.conclusion.lhs = chain;
  rep.details["factors"] = factors;
  rep.details["factor_identity"] = identity;
  rep.finish();
  return rep;
}

PsiInterp blend_with_uniform(const PsiInterp& Psi, const Rational& t) {
  PsiInterp out;
  for (const auto& [key, d] : Psi.table) {
    long support = std::count_if(d.begin(), d.end(), [](const auto& kv) { return kv.second > 0; });
    Dist blended;
    for (const auto& [k, p] : d) blended[k] = p > 0 ? Rational((1 - t) * p + t / Rational(support)) : Rational(0);
    out.table[key] = blended;
  }
  return out;
}

SweepResult epsilon_sweep(const Setting& st, const std::function<std::optional<double>(const Setting&)>& eval,
                          int steps) {
  SweepResult res;
  auto at = [&](const Rational& t) {
    Setting s = st;
    s.Psi = blend_with_uniform(st.Psi, t);
    return eval(s);
  };
  auto zero = eval(st);
  if (!zero) return res;
  res.holds_at_zero = true;
  res.epsilon = *zero;
  if (auto one = at(1)) {
    res.t = 1;
    res.epsilon = *one;
    res.holds_throughout = true;
    return res;
  }
  Rational lo = 0, hi = 1;
  for (int k = 0; k < steps; ++k) {
    Rational mid = (lo + hi) / 2;
    if (auto r = at(mid)) {
      lo = mid;
      res.epsilon = *r;
    } else {
      hi = mid;
    }
  }
  res.t = to_double(lo);
  return res;
}

Json to_json(const SweepResult& s) {
  return Json{{"t", s.t},
              {"epsilon", number_json(s.epsilon)},
              {"holds_at_zero", s.holds_at_zero},
              {"holds_throughout", s.holds_throughout}};
}

namespace {

using namespace detail;

Json set_list(const std::vector<ClaimSet>& sets, std::size_t limit = 8) {
  Json out = Json::array();
  for (std::size_t i = 0; i < sets.size() && i < limit; ++i) out.push_back(to_string(sets[i]));
  return out;
}

std::vector<ClaimSet> scope_subsets(const EvidenceScenario& scn) {
  ClaimSet all = cumulative(scn, scn.paths.size());
  Budget budget;
  budget.charge(1L << std::min<std::size_t>(all.size(), 40));
  return all_subsets(all);
}

// Calibration-type hypotheses evaluated over a family of reasoner claim sets.
struct ScopeCheck {
  std::vector<ClaimSet> not_pairs;
  std::vector<ClaimSet> not_calibrated;
  std::vector<ClaimSet> not_full_support;
  double max_score = 0;
  bool indeterminate = false;
};

template <typename PairFn, typename ScoreFn, typename SupportFn>
ScopeCheck scan_scope(const std::vector<ClaimSet>& sets, double epsilon, PairFn is_pair, ScoreFn score, SupportFn support) {
  ScopeCheck sc;
  for (const auto& s : sets) {
    if (!is_pair(s)) {
      sc.not_pairs.push_back(s);
      sc.not_calibrated.push_back(s);
      continue;
    }
    Score sco = score(s);
    if (!sco.determinate()) sc.indeterminate = true;
    sc.max_score = std::max(sc.max_score, sco.high);
    if (!(sco.high <= epsilon)) sc.not_calibrated.push_back(s);
    if (!support(s)) sc.not_full_support.push_back(s);
  }
  return sc;
}

void add_scope_preconditions(CheckReport& rep, const ScopeCheck& sc, const std::string& pair_label,
                             const std::string& calib_label, std::size_t scope) {
  rep.require(pair_label, sc.not_pairs.empty(), Json{{"scope", scope}, {"failing", set_list(sc.not_pairs)}});
  rep.require(calib_label, sc.not_calibrated.empty(),
              Json{{"max_score", number_json(sc.max_score)}, {"indeterminate", sc.indeterminate}, {"failing", set_list(sc.not_calibrated)}});
  rep.require("(4) full support for the Lipschitz gate", sc.not_full_support.empty(),
              Json{{"failing", set_list(sc.not_full_support)}});
  rep.details["max_score"] = number_json(sc.max_score);
}

CheckReport evidence_math_core(const Setting& st, const Question& q, const EvidenceScenario& scn, const Answer& target,
                               double epsilon) {
  CheckReport rep("p73");
  const QuestionVector* psiq = st.psi.at(q);
  rep.require("|psi(q)| = 1", psiq && psiq->size() == 1);
  rep.require("at least one path", !scn.paths.empty());
  if (!rep.preconditions_hold()) {
    rep.finish();
    return rep;
  }
  try {
    PredictionDistribution F(st);
    PredictionEvidence model(F, *psiq, target);
    auto ev = is_evidence_collection(model, scn);
    rep.require("(1) evidence collection under the prediction distribution", ev.verdict == Verdict::Verified,
                ev.conclusion.lhs.is_null() ? Json(ev.preconditions.back().witness) : ev.conclusion.lhs);
  } catch (const SmsError& e) {
    rep.require("(1) evidence collection under the prediction distribution", false, e.what());
  }
  auto subsets = scope_subsets(scn);
  auto sc = scan_scope(
      subsets, epsilon, [&](const ClaimSet& s) { return is_prediction_pair(st, q, s).conclusion.holds; },
      [&](const ClaimSet& s) { return safe_score([&] { return calibration_score(st, q, s); }); },
      [&](const ClaimSet& s) { return oracle_full_support(st, *psiq, q, s); });
  add_scope_preconditions(rep, sc, "(2) prediction pair for every subset", "(3) calibrated at epsilon for every subset",
                          subsets.size());

  try {
    LawEvidence oracle(st.oracle, psiq->front(), target);
    Json chain = Json::array();
    Rational margin = 0;
    rep.conclusion.holds = chain_holds(oracle, scn, chain, &margin);
    rep.conclusion.lhs = chain;
    rep.conclusion.margin = to_string(margin);
    rep.details["margin_float"] = to_double(margin);
  } catch (const SmsError& e) {
    rep.conclusion.holds = false;
    rep.conclusion.lhs = std::string("undefined: ") + e.what();
  }
  rep.details["epsilon"] = number_json(epsilon);
  rep.finish();
  return rep;
}

CheckReport evidence_sci_core(const Setting& st, const EmbeddingMap& E, const Question& q, const EvidenceScenario& scn,
                              const Answer& target, double epsilon, const VerifyOptions& opt) {
  CheckReport rep("p74");
  const QuestionVector* psiq = st.psi.at(q);
  rep.require("|psi(q)| = 1", psiq && psiq->size() == 1);
  rep.require("at least one path", !scn.paths.empty());
  if (!rep.preconditions_hold()) {
    rep.finish();
    return rep;
  }
  add_embedding_precondition(rep, st, E, opt);
  try {
    PredictionDistribution F(st, &E);
    PredictionEvidence model(F, *psiq, target);
    auto ev = is_evidence_collection(model, scn);
    rep.require("(1) evidence collection under the embedded prediction distribution", ev.verdict == Verdict::Verified,
                ev.conclusion.lhs.is_null() ? Json(ev.preconditions.back().witness) : ev.conclusion.lhs);
  } catch (const SmsError& e) {
    rep.require("(1) evidence collection under the embedded prediction distribution", false, e.what());
  }
  auto subsets = scope_subsets(scn);
  auto sc = scan_scope(
      subsets, epsilon, [&](const ClaimSet& s) { return is_embedded_prediction_pair(st, E, q, s).conclusion.holds; },
      [&](const ClaimSet& s) { return safe_score([&] { return embed_calibration_score(st, E, q, s); }); },
      [&](const ClaimSet& s) { return universe_full_support(st, E, *psiq, q, s); });
  add_scope_preconditions(rep, sc, "(2) embedded prediction pair for every subset",
                          "(3) embed-calibrated at epsilon for every subset", subsets.size());

  // G(i) = sum_v P2(v | q, c_i) * P1(v* | psi(q), E^-1[{(q,v)} u c_i])
  auto expectation = [&](const ClaimSet& c) {
    Rational total = 0;
    for (const auto& [v, p] : reasoner_answers(st, q, c)) {
      if (p == 0) continue;
      Dist u = universe_conditional(st, E, q, v, c);
      auto it = u.find({target});
      if (it != u.end()) total += p * it->second;
    }
    return total;
  };
  try {
    Json rows = Json::array();
    bool ok = true;
    std::optional<Rational> worst;
    Rational before = expectation(cumulative(scn, 0));
    for (std::size_t i = 1; i <= scn.paths.size(); ++i) {
      Rational now = expectation(cumulative(scn, i));
      bool holds = now > before;
      ok = ok && holds;
      if (!worst || now - before < *worst) worst = now - before;
      rows.push_back(Json{{"i", i}, {"expectation_i", to_string(now)}, {"expectation_i_minus_1", to_string(before)}, {"holds", holds}});
      before = now;
    }
    rep.conclusion.holds = ok;
    rep.conclusion.lhs = rows;
    rep.conclusion.margin = to_string(*worst);
    rep.details["margin_float"] = to_double(*worst);
  } catch (const SmsError& e) {
    rep.conclusion.holds = false;
    rep.conclusion.lhs = std::string("undefined: ") + e.what();
  }
  rep.details["epsilon"] = number_json(epsilon);
  rep.finish();
  return rep;
}

CheckReport evidence_flipped_core(const Setting& st, const EmbeddingMap& E, const Question& q,
                                  const EvidenceScenario& scn, const Answer& target, double epsilon,
                                  const VerifyOptions& opt) {
  CheckReport rep("p75");
  const QuestionVector* psiq = st.psi.at(q);
  rep.require("|psi(q)| = 1", psiq && psiq->size() == 1);
  rep.require("at least one path", !scn.paths.empty());
  if (!rep.preconditions_hold()) {
    rep.finish();
    return rep;
  }
  add_embedding_precondition(rep, st, E, opt);
  LawEvidence universe(st.oracle, psiq->front(), target);
  try {
    auto ev = is_evidence_collection(universe, scn);
    rep.require("(1) evidence collection under the universe limit", ev.verdict == Verdict::Verified,
                ev.conclusion.lhs.is_null() ? Json(ev.preconditions.back().witness) : ev.conclusion.lhs);
  } catch (const SmsError& e) {
    rep.require("(1) evidence collection under the universe limit", false, e.what());
  }

  auto subsets = scope_subsets(scn);
  std::vector<ClaimSet> images;
  std::vector<ClaimSet> outside;
  for (const auto& s : subsets) {
    if (E.defined(s))
      images.push_back(E.image(s));
    else
      outside.push_back(s);
  }
  auto sc = scan_scope(
      images, epsilon, [&](const ClaimSet& s) { return is_embedded_prediction_pair(st, E, q, s).conclusion.holds; },
      [&](const ClaimSet& s) { return safe_score([&] { return embed_calibration_score(st, E, q, s); }); },
      [&](const ClaimSet& s) { return universe_full_support(st, E, *psiq, q, s); });
  sc.not_pairs.insert(sc.not_pairs.end(), outside.begin(), outside.end());
  add_scope_preconditions(rep, sc, "(2) embedded prediction pair at E of every subset",
                          "(3) embed-calibrated at epsilon at E of every subset", subsets.size());

  // (5) P1(v* | psi(q), E^-1[{(q,v)} u E[c_i]]) / P1(v* | psi(q), c_i) is the same for every v.
  Json ratios = Json::array();
  bool proportional = true;
  for (std::size_t i = 1; i <= scn.paths.size() && proportional; ++i) {
    ClaimSet c = cumulative(scn, i);
    if (!E.defined(c)) {
      proportional = false;
      ratios.push_back(Json{{"i", i}, {"error", "E undefined at " + to_string(c)}});
      break;
    }
    Rational base;
    try {
      base = universe.target(c);
    } catch (const SmsError&) {
      continue;
    }
    if (base == 0) continue;
    std::optional<Rational> first;
    for (const auto& v : st.phi2.answers) {
      Dist u;
      try {
        u = universe_conditional(st, E, q, v, E.image(c));
      } catch (const SmsError&) {
        continue;
      }
      Rational r = (u.count({target}) ? u.at({target}) : Rational(0)) / base;
      ratios.push_back(Json{{"i", i}, {"v", v}, {"ratio", to_string(r)}});
      if (!first)
        first = r;
      else if (r != *first)
        proportional = false;
    }
  }
  rep.require("(5) universe conditional proportional across answers", proportional, ratios);

  try {
    PredictionDistribution F(st, &E);
    Json rows = Json::array();
    bool ok = true;
    std::optional<Rational> worst;
    for (std::size_t i = 1; i <= scn.paths.size(); ++i) {
      Rational now = F.value(*psiq, {target}, E.image(cumulative(scn, i)));
      Rational before = F.value(*psiq, {target}, E.image(cumulative(scn, i - 1)));
      bool holds = now > before;
      ok = ok && holds;
      if (!worst || now - before < *worst) worst = now - before;
      rows.push_back(Json{{"i", i}, {"F_i", to_string(now)}, {"F_i_minus_1", to_string(before)}, {"holds", holds}});
    }
    rep.conclusion.holds = ok;
    rep.conclusion.lhs = rows;
    rep.conclusion.margin = to_string(*worst);
    rep.details["margin_float"] = to_double(*worst);
  } catch (const SmsError& e) {
    rep.conclusion.holds = false;
    rep.conclusion.lhs = std::string("undefined: ") + e.what();
  }
  rep.details["epsilon"] = number_json(epsilon);
  rep.finish();
  return rep;
}

}  // namespace

CheckReport verify_evidence_math(const Setting& st, const Question& q, const EvidenceScenario& scn,
                                 const Answer& target, double epsilon, const VerifyOptions& opt) {
  return run_with_sweep(st, epsilon, opt, [&](const Setting& s, double eps) {
    return evidence_math_core(s, q, scn, target, eps);
  });
}

CheckReport verify_evidence_sci(const Setting& st, const EmbeddingMap& E, const Question& q,
                                const EvidenceScenario& scn, const Answer& target, double epsilon,
                                const VerifyOptions& opt) {
  return run_with_sweep(st, epsilon, opt, [&](const Setting& s, double eps) {
    return evidence_sci_core(s, E, q, scn, target, eps, opt);
  });
}

CheckReport verify_evidence_sci_flipped(const Setting& st, const EmbeddingMap& E, const Question& q,
                                        const EvidenceScenario& scn, const Answer& target, double epsilon,
                                        const VerifyOptions& opt) {
  return run_with_sweep(st, epsilon, opt, [&](const Setting& s, double eps) {
    return evidence_flipped_core(s, E, q, scn, target, eps, opt);
  });
}

}  // namespace smslab
