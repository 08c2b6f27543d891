#include "smslab/calibration.hpp"

#include <set>

#include "smslab/embedding.hpp"
#include "smslab/errors.hpp"

namespace smslab {

const QuestionVector* PsiMap::at(const Question& q) const {
  auto it = map.find(q);
  return it == map.end() ? nullptr : &it->second;
}

bool PsiMap::injective() const {
  std::set<QuestionVector> seen;
  for (const auto& [q, qs] : map)
    if (!seen.insert(qs).second) return false;
  return true;
}

std::optional<Question> PsiMap::inverse(const QuestionVector& qs) const {
  std::optional<Question> found;
  for (const auto& [q, target] : map) {
    if (target != qs) continue;
    if (found) throw StructuralError("psi is not injective at " + to_string(qs));
    found = q;
  }
  return found;
}

const Dist* PsiInterp::find(const QuestionVector& qs, const Answer& v) const {
  auto it = table.find({qs, v});
  return it == table.end() ? nullptr : &it->second;
}

Setting make_setting(SmsSpec phi1, SmsSpec phi2, PsiMap psi, PsiInterp Psi, int step, DivergenceKind kind,
                     int oracle_step) {
  Setting st;
  st.oracle = law_at(phi1, oracle_step);
  st.reasoner = step_law(phi2, step);
  st.phi1 = std::move(phi1);
  st.phi2 = std::move(phi2);
  st.psi = std::move(psi);
  st.Psi = std::move(Psi);
  st.step = step;
  st.oracle_step = oracle_step;
  st.kind = kind;
  return st;
}

std::map<Answer, Rational> reasoner_answers(const Setting& st, const Question& q, const ClaimSet& s) {
  std::map<Answer, Rational> out;
  for (const auto& [tuple, p] : cond_answers(st.reasoner, {q}, Event{s, {}, std::nullopt}))
    out[tuple.front()] = p;
  return out;
}

namespace {

void condition(CheckReport& rep, const std::string& label, bool holds, Json witness = nullptr) {
  if (!rep.details.contains("conditions")) rep.details["conditions"] = Json::array();
  rep.details["conditions"].push_back(Json{{"label", label}, {"holds", holds}, {"witness", witness}});
  if (!holds) rep.conclusion.holds = false;
}

void require_alphabets(const Setting& st) {
  std::set<Question> q1(st.phi1.questions.begin(), st.phi1.questions.end());
  std::set<Answer> v1(st.phi1.answers.begin(), st.phi1.answers.end());
  for (const auto& q : st.phi2.questions)
    if (!q1.count(q)) throw StructuralError("reasoner question " + q + " is not an oracle question");
  for (const auto& v : st.phi2.answers)
    if (!v1.count(v)) throw StructuralError("reasoner answer " + v + " is not an oracle answer");
}

Json bracket_json(const Bracket& b) { return Json{{"lower", to_string(b.lower)}, {"upper", to_string(b.upper)}}; }

}  // namespace

CheckReport is_prediction_pair(const Setting& st, const Question& q, const ClaimSet& s) {
  require_alphabets(st);
  CheckReport rep("prediction-pair");
  rep.conclusion.holds = true;
  Rational mass = prob_value(st.reasoner, Event{s, {q}, std::nullopt});
  condition(rep, "(1) reasoner conditional defined", mass > 0, Json{{"P2(q,C)", to_string(mass)}});
  const QuestionVector* psiq = st.psi.at(q);
  condition(rep, "(2) q in dom psi", psiq != nullptr, Json{{"q", q}});
  if (mass > 0 && psiq) {
    Json missing = Json::array();
    for (const auto& [v, p] : reasoner_answers(st, q, s))
      if (p > 0 && !st.Psi.find(*psiq, v)) missing.push_back(v);
    condition(rep, "(3) Psi defined for every positive answer", missing.empty(), Json{{"missing", missing}});
  } else {
    condition(rep, "(3) Psi defined for every positive answer", false, "not evaluable");
  }
  if (psiq) {
    Bracket b = prob(st.oracle, Event{s, *psiq, std::nullopt});
    condition(rep, "(4) oracle conditional defined", b.lower > 0, bracket_json(b));
  } else {
    condition(rep, "(4) oracle conditional defined", false, "not evaluable");
  }
  rep.details["q"] = q;
  rep.details["C"] = to_string(s);
  rep.finish();
  return rep;
}

std::string verdict_at(const Score& s, double epsilon) {
  if (s.high <= epsilon) return "calibrated";
  if (s.low > epsilon) return "not calibrated";
  return "indeterminate at horizon";
}

Score calibration_score(const Setting& st, const Question& q, const ClaimSet& s) {
  auto pair = is_prediction_pair(st, q, s);
  if (!pair.conclusion.holds)
    throw PreconditionError("(" + q + ", " + to_string(s) + ") is not a prediction pair");
  if (!st.oracle.exact) return Score{0, kInf};
  const QuestionVector& psiq = *st.psi.at(q);
  Dist oracle = cond_answers(st.oracle, psiq, Event{s, {}, std::nullopt});
  double total = 0;
  for (const auto& [v, p] : reasoner_answers(st, q, s)) {
    if (p == 0) continue;
    total += to_double(p) * divergence(*st.Psi.find(psiq, v), oracle, st.kind);
  }
  return Score{total, total};
}

Reduction single_sms_reduction(const SmsSpec& step_spec, const SmsSpec& limit_spec, int n, const Question& q,
                               const ClaimSet& s, DivergenceKind kind) {
  Law step = step_law(step_spec, n);
  Law limit = limit_law(limit_spec);
  Dist here = cond_answers(step, {q}, Event{s, {}, std::nullopt});
  Dist there = cond_answers(limit, {q}, Event{s, {}, std::nullopt});
  Reduction r;
  r.reduction = divergence(here, there, kind);
  for (const auto& [v, p] : here) {
    if (p == 0) continue;
    r.delta_score += to_double(p) * divergence(Dist{{v, 1}}, there, kind);
  }
  r.bound_holds = r.reduction <= r.delta_score + 1e-12;
  return r;
}

CheckReport is_honest(const SmsSpec& phi, int n, const PsiMap& psi, const PsiInterp& Psi, const Question& q,
                      const Answer& v, const ClaimSet& s) {
  CheckReport rep("honest");
  Law law = law_at(phi, n);
  ClaimSet augmented = with_claim(s, Claim{q, v});
  const QuestionVector* psiq = psi.at(q);
  rep.require("q in dom psi", psiq != nullptr);
  const Dist* claimed = psiq ? Psi.find(*psiq, v) : nullptr;
  rep.require("Psi defined at (psi(q), v)", claimed != nullptr);
  if (!psiq || !claimed) {
    rep.finish();
    return rep;
  }
  Dist own = cond_answers(law, *psiq, Event{augmented, {}, std::nullopt});
  std::set<AnswerVector> keys;
  for (const auto& [k, p] : own) keys.insert(k);
  for (const auto& [k, p] : *claimed) keys.insert(k);
  rep.conclusion.holds = true;
  Json diffs = Json::array();
  for (const auto& k : keys) {
    Rational a = own.count(k) ? own.at(k) : Rational(0);
    Rational b = claimed->count(k) ? claimed->at(k) : Rational(0);
    if (a != b) {
      rep.conclusion.holds = false;
      diffs.push_back(Json{{"answers", k}, {"own", to_string(a)}, {"Psi", to_string(b)}});
    }
  }
  rep.conclusion.lhs = to_string(own);
  rep.conclusion.rhs = to_string(*claimed);
  rep.details["differences"] = diffs;
  rep.finish();
  return rep;
}

PsiInterp honest_interp(const SmsSpec& phi, int n, const PsiMap& psi, const Question& q, const ClaimSet& s) {
  Law law = law_at(phi, n);
  const QuestionVector* psiq = psi.at(q);
  if (!psiq) throw DomainError("q not in dom psi");
  PsiInterp out;
  for (const auto& [tuple, p] : cond_answers(law, {q}, Event{s, {}, std::nullopt})) {
    if (p == 0) continue;
    ClaimSet aug = with_claim(s, Claim{q, tuple.front()});
    out.table[{*psiq, tuple.front()}] = cond_answers(law, *psiq, Event{aug, {}, std::nullopt});
  }
  return out;
}

PredictionDistribution::PredictionDistribution(const Setting& st, const EmbeddingMap* E) : st_(&st), E_(E) {
  if (!st.psi.invertible || !st.psi.injective())
    throw StructuralError("the prediction distribution needs an invertible psi");
  Budget budget;
  std::set<ClaimSet> candidates{ClaimSet{}};
  for (const auto& a : st.reasoner.atoms)
    for (const auto& sub : all_subsets(a.set)) {
      budget.charge();
      candidates.insert(sub);
    }
  for (const auto& [q, qs] : st.psi.map)
    for (const auto& c : candidates)
      if (is_pair(q, c)) return;
  throw StructuralError("no prediction pair exists for the reasoner at step " + std::to_string(st.step));
}

bool PredictionDistribution::is_pair(const Question& q, const ClaimSet& s) const {
  if (E_) return is_embedded_prediction_pair(*st_, *E_, q, s).conclusion.holds;
  return is_prediction_pair(*st_, q, s).conclusion.holds;
}

Question PredictionDistribution::question_for(const QuestionVector& psiq) const {
  auto q = st_->psi.inverse(psiq);
  if (!q) throw DomainError(to_string(psiq) + " is not in the codomain of psi");
  return *q;
}

Rational PredictionDistribution::weight(const QuestionVector& psiq, const ClaimSet& s) const {
  Question q = question_for(psiq);
  if (!is_pair(q, s)) return 0;
  return prob_value(st_->reasoner, Event{s, {q}, std::nullopt});
}

Dist PredictionDistribution::value(const QuestionVector& psiq, const ClaimSet& s) const {
  Question q = question_for(psiq);
  if (weight(psiq, s) == 0)
    throw ConditioningError("zero-probability conditioning event in the prediction distribution: " +
                            to_string(psiq) + " given " + to_string(s));
  Dist out;
  for (const auto& [v, p] : reasoner_answers(*st_, q, s)) {
    if (p == 0) continue;
    for (const auto& [tuple, r] : *st_->Psi.find(psiq, v)) out[tuple] += p * r;
  }
  return out;
}

Rational PredictionDistribution::value(const QuestionVector& psiq, const AnswerVector& answers,
                                       const ClaimSet& s) const {
  Dist d = value(psiq, s);
  auto it = d.find(answers);
  return it == d.end() ? Rational(0) : it->second;
}

Rational PredictionDistribution::cond_sets(const QuestionVector& psiq, const ClaimSet& extra,
                                           const ClaimSet& beta) const {
  Rational denom = weight(psiq, beta);
  if (denom == 0)
    throw ConditioningError("zero-probability conditioning event in the prediction distribution: " +
                            to_string(psiq) + " given " + to_string(beta));
  return weight(psiq, set_union(beta, extra)) / denom;
}

}  // namespace smslab
