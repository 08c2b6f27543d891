#include "smslab/scenario.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "smslab/abduction.hpp"
#include "smslab/embedding.hpp"
#include "smslab/errors.hpp"

namespace smslab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError((path.empty() ? std::string("/") : path) + ": " + msg);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing key \"") + key + "\"");
  return *it;
}

std::string str(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Rational rational(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.dump());
    if (j.is_number()) return parse_rational(j.dump());
  } catch (const std::invalid_argument& e) {
    fail(path, std::string("bad rational: ") + e.what());
  }
  fail(path, "expected a rational (\"a/b\" string or number)");
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::vector<std::string> strings(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(str(j[i], path + "/" + std::to_string(i)));
  return out;
}

Claim claim(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "a claim is [question, answer]");
  return Claim{str(j[0], path + "/0"), str(j[1], path + "/1")};
}

ClaimVector vector_of(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of claims");
  ClaimVector out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(claim(j[i], path + "/" + std::to_string(i)));
  return out;
}

Json vector_json(const ClaimVector& v) {
  Json out = Json::array();
  for (const auto& c : v) out.push_back(Json::array({c.question, c.answer}));
  return out;
}

Table table_of(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a table (array of rows)");
  Table out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = path + "/" + std::to_string(i);
    const Json& row = j[i];
    if (!row.is_object()) fail(p, "expected a row object");
    ClaimVector v;
    if (row.contains("vector"))
      v = vector_of(row["vector"], p + "/vector");
    else if (row.contains("set")) {
      ClaimSet s = claim_set_from_json(row["set"], p + "/set");
      v.assign(s.begin(), s.end());
    } else {
      fail(p, "a row needs \"vector\" or \"set\"");
    }
    out.push_back(Row{v, rational(field(row, "p", p), p + "/p")});
  }
  return out;
}

Json table_json(const Table& t) {
  Json out = Json::array();
  for (const auto& r : t) out.push_back(Json{{"vector", vector_json(r.vector)}, {"p", to_string(r.p)}});
  return out;
}

Json epsilon_json(double e) { return number_json(e); }

double epsilon_of(const Json& j, const std::string& path) {
  if (j.is_string() && (j == "inf" || j == "infinity")) return std::numeric_limits<double>::infinity();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return to_double(parse_rational(j.get<std::string>()));
    } catch (const std::invalid_argument&) {
    }
  }
  fail(path, "expected a number");
}

void check_in(const std::set<std::string>& alphabet, const std::string& id, const std::string& path,
              const std::string& what) {
  if (!alphabet.count(id)) fail(path, "unknown " + what + " \"" + id + "\"");
}

void check_claims(const ClaimSet& s, const SmsSpec& spec, const std::string& path) {
  std::set<std::string> qs(spec.questions.begin(), spec.questions.end()), as(spec.answers.begin(), spec.answers.end());
  for (const auto& c : s) {
    check_in(qs, c.question, path, "question");
    check_in(as, c.answer, path, "answer");
  }
}

}  // namespace

Json claim_set_json(const ClaimSet& s) {
  Json out = Json::array();
  for (const auto& c : s) out.push_back(Json::array({c.question, c.answer}));
  return out;
}

ClaimSet claim_set_from_json(const Json& j, const std::string& path) {
  ClaimVector v = vector_of(j, path);
  return ClaimSet(v.begin(), v.end());
}

Json dist_json(const Dist& d) {
  Json out = Json::array();
  for (const auto& [k, p] : d) out.push_back(Json{{"answers", k}, {"p", to_string(p)}});
  return out;
}

Json to_json(const SmsSpec& spec) {
  Json out{{"questions", spec.questions},
           {"answers", spec.answers},
           {"horizon", spec.horizon},
           {"mode", spec.mode == SmsMode::PerStep ? "per-step" : "kernel"}};
  if (spec.mode == SmsMode::PerStep) {
    Json steps = Json::array();
    for (const auto& t : spec.steps) steps.push_back(table_json(t));
    out["steps"] = steps;
  } else {
    out["init"] = table_json(spec.init);
    Json kernel = Json::array();
    for (const auto& [from, to] : spec.kernel) kernel.push_back(Json{{"from", vector_json(from)}, {"to", table_json(to)}});
    out["kernel"] = kernel;
  }
  if (spec.kappa) out["kappa"] = *spec.kappa;
  return out;
}

SmsSpec sms_from_json(const Json& j, const std::string& path) {
  SmsSpec spec;
  spec.questions = strings(field(j, "questions", path), path + "/questions");
  spec.answers = strings(field(j, "answers", path), path + "/answers");
  std::string mode = j.contains("mode") ? str(j["mode"], path + "/mode") : "per-step";
  if (mode == "per-step") {
    spec.mode = SmsMode::PerStep;
    const Json& steps = field(j, "steps", path);
    if (!steps.is_array()) fail(path + "/steps", "expected an array of tables");
    for (std::size_t i = 0; i < steps.size(); ++i)
      spec.steps.push_back(table_of(steps[i], path + "/steps/" + std::to_string(i)));
    spec.horizon = j.contains("horizon") ? integer(j["horizon"], path + "/horizon") : static_cast<int>(spec.steps.size());
  } else if (mode == "kernel") {
    spec.mode = SmsMode::Kernel;
    spec.init = table_of(field(j, "init", path), path + "/init");
    const Json& kernel = field(j, "kernel", path);
    if (!kernel.is_array()) fail(path + "/kernel", "expected an array of {from, to}");
    for (std::size_t i = 0; i < kernel.size(); ++i) {
      std::string p = path + "/kernel/" + std::to_string(i);
      ClaimVector from = vector_of(field(kernel[i], "from", p), p + "/from");
      if (spec.kernel.count(from)) fail(p, "duplicate kernel row " + to_string(from));
      spec.kernel[from] = table_of(field(kernel[i], "to", p), p + "/to");
    }
    spec.horizon = integer(field(j, "horizon", path), path + "/horizon");
  } else {
    fail(path + "/mode", "mode must be \"per-step\" or \"kernel\"");
  }
  if (j.contains("kappa") && !j["kappa"].is_null()) spec.kappa = integer(j["kappa"], path + "/kappa");
  auto report = validate(spec);
  if (!report.valid()) {
    std::string msg;
    for (const auto& v : report.violations) msg += (msg.empty() ? "" : "; ") + v;
    fail(path, msg);
  }
  return spec;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  if (!j.is_object()) fail("", "expected a scenario object");
  if (j.contains("schema")) {
    s.schema = integer(j["schema"], "/schema");
    if (s.schema != 1) fail("/schema", "unsupported schema " + std::to_string(s.schema));
  }
  s.sms1 = sms_from_json(field(j, "sms1", ""), "/sms1");
  if (j.contains("sms2") && !j["sms2"].is_null()) s.sms2 = sms_from_json(j["sms2"], "/sms2");
  const SmsSpec& reasoner = s.sms2 ? *s.sms2 : s.sms1;
  std::set<std::string> q1(s.sms1.questions.begin(), s.sms1.questions.end());
  std::set<std::string> v1(s.sms1.answers.begin(), s.sms1.answers.end());
  std::set<std::string> q2(reasoner.questions.begin(), reasoner.questions.end());
  std::set<std::string> v2(reasoner.answers.begin(), reasoner.answers.end());

  if (j.contains("psi") && !j["psi"].is_null()) {
    const Json& pj = j["psi"];
    PsiMap psi;
    const Json& map = field(pj, "map", "/psi");
    if (!map.is_object()) fail("/psi/map", "expected an object question -> [questions]");
    for (const auto& [q, target] : map.items()) {
      std::string p = "/psi/map/" + q;
      check_in(q2, q, p, "question");
      auto qs = strings(target, p);
      for (const auto& t : qs) check_in(q1, t, p, "question");
      psi.map[q] = qs;
    }
    if (pj.contains("invertible")) psi.invertible = pj["invertible"].get<bool>();
    s.psi = psi;
  }
  if (j.contains("Psi") && !j["Psi"].is_null()) {
    const Json& tj = j["Psi"];
    if (!tj.is_array()) fail("/Psi", "expected an array of entries");
    PsiInterp Psi;
    for (std::size_t i = 0; i < tj.size(); ++i) {
      std::string p = "/Psi/" + std::to_string(i);
      auto qs = strings(field(tj[i], "questions", p), p + "/questions");
      for (const auto& q : qs) check_in(q1, q, p + "/questions", "question");
      std::string v = str(field(tj[i], "answer", p), p + "/answer");
      check_in(v2, v, p + "/answer", "answer");
      const Json& dj = field(tj[i], "dist", p);
      if (!dj.is_array()) fail(p + "/dist", "expected an array of {answers, p}");
      Dist d;
      Rational total = 0;
      for (std::size_t k = 0; k < dj.size(); ++k) {
        std::string pk = p + "/dist/" + std::to_string(k);
        auto as = strings(field(dj[k], "answers", pk), pk + "/answers");
        if (as.size() != qs.size()) fail(pk, "answer tuple arity differs from the question vector");
        for (const auto& a : as) check_in(v1, a, pk + "/answers", "answer");
        Rational pr = rational(field(dj[k], "p", pk), pk + "/p");
        if (pr < 0) fail(pk + "/p", "negative probability");
        d[as] += pr;
        total += pr;
      }
      if (total != 1) fail(p + "/dist", "Psi entry sums to " + to_string(total));
      if (Psi.table.count({qs, v})) fail(p, "duplicate Psi entry");
      Psi.table[{qs, v}] = d;
    }
    s.Psi = Psi;
  }
  if (j.contains("E") && !j["E"].is_null()) {
    const Json& ej = j["E"];
    if (!ej.is_array()) fail("/E", "expected an array of {from, to}");
    std::map<ClaimSet, ClaimSet> table;
    for (std::size_t i = 0; i < ej.size(); ++i) {
      std::string p = "/E/" + std::to_string(i);
      ClaimSet from = claim_set_from_json(field(ej[i], "from", p), p + "/from");
      ClaimSet to = claim_set_from_json(field(ej[i], "to", p), p + "/to");
      check_claims(from, s.sms1, p + "/from");
      check_claims(to, reasoner, p + "/to");
      if (table.count(from)) fail(p, "duplicate entry for " + to_string(from));
      table[from] = to;
    }
    s.E = EmbeddingMap(table);
  }
  if (j.contains("divergence")) {
    try {
      s.divergence = divergence_from_string(str(j["divergence"], "/divergence"));
    } catch (const SmsError& e) {
      fail("/divergence", e.what());
    }
  }
  if (j.contains("epsilon")) s.epsilon = epsilon_of(j["epsilon"], "/epsilon");
  if (j.contains("step")) s.step = integer(j["step"], "/step");
  if (j.contains("tol")) s.tol = rational(j["tol"], "/tol");
  if (j.contains("checks")) {
    const Json& cj = j["checks"];
    if (!cj.is_array()) fail("/checks", "expected an array");
    for (std::size_t i = 0; i < cj.size(); ++i) {
      std::string p = "/checks/" + std::to_string(i);
      CheckRequest req;
      req.name = str(field(cj[i], "name", p), p + "/name");
      if (cj[i].contains("args")) req.args = cj[i]["args"];
      s.checks.push_back(req);
    }
  }
  return s;
}

Scenario parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("syntax error at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  return scenario_from_json(j);
}

Json to_json(const Scenario& s) {
  Json out{{"schema", s.schema}, {"sms1", to_json(s.sms1)}};
  if (s.sms2) out["sms2"] = to_json(*s.sms2);
  if (s.psi) {
    Json map = Json::object();
    for (const auto& [q, qs] : s.psi->map) map[q] = qs;
    out["psi"] = Json{{"map", map}, {"invertible", s.psi->invertible}};
  }
  if (s.Psi) {
    Json entries = Json::array();
    for (const auto& [key, d] : s.Psi->table)
      entries.push_back(Json{{"questions", key.first}, {"answer", key.second}, {"dist", dist_json(d)}});
    out["Psi"] = entries;
  }
  if (s.E) {
    Json entries = Json::array();
    for (const auto& [from, to] : s.E->table())
      entries.push_back(Json{{"from", claim_set_json(from)}, {"to", claim_set_json(to)}});
    out["E"] = entries;
  }
  out["divergence"] = to_string(s.divergence);
  out["epsilon"] = epsilon_json(s.epsilon);
  out["step"] = s.step;
  out["tol"] = to_string(s.tol);
  Json checks = Json::array();
  for (const auto& c : s.checks) checks.push_back(Json{{"name", c.name}, {"args", c.args}});
  out["checks"] = checks;
  return out;
}

std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

std::string digest(const Scenario& s) {
  std::string text = to_json(s).dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

Setting setting_of(const Scenario& s) {
  if (!s.sms2) throw DomainError("the scenario has no sms2");
  if (!s.psi) throw DomainError("the scenario has no psi");
  if (!s.Psi) throw DomainError("the scenario has no Psi");
  return make_setting(s.sms1, *s.sms2, *s.psi, *s.Psi, s.step, s.divergence);
}

Json to_json(const RunReport& r) {
  Json reports = Json::array();
  for (const auto& c : r.reports) reports.push_back(to_json(c));
  Json out{{"schema", r.schema}, {"scenario_digest", r.scenario_digest}, {"seed", r.seed}, {"reports", reports}};
  if (r.timing) out["timing"] = *r.timing;
  return out;
}

RunReport run_report_from_json(const Json& j) {
  RunReport r;
  r.schema = field(j, "schema", "").get<int>();
  r.scenario_digest = str(field(j, "scenario_digest", ""), "/scenario_digest");
  r.seed = field(j, "seed", "").get<std::uint64_t>();
  for (const auto& c : field(j, "reports", "")) r.reports.push_back(check_report_from_json(c));
  if (j.contains("timing")) r.timing = j["timing"];
  return r;
}

namespace {

const Json& arg(const CheckRequest& req, const char* key) {
  return field(req.args, key, "/checks/" + req.name + "/args");
}

std::string arg_str(const CheckRequest& req, const char* key) {
  return str(arg(req, key), "/checks/" + req.name + "/args/" + key);
}

ClaimSet arg_set(const CheckRequest& req, const char* key) {
  if (!req.args.contains(key)) return {};
  return claim_set_from_json(req.args[key], "/checks/" + req.name + "/args/" + key);
}

const SmsSpec& arg_sms(const Scenario& s, const CheckRequest& req) {
  std::string which = req.args.contains("sms") ? arg_str(req, "sms") : (s.sms2 ? "sms2" : "sms1");
  if (which == "sms1") return s.sms1;
  if (which == "sms2" && s.sms2) return *s.sms2;
  fail("/checks/" + req.name + "/args/sms", "unknown SMS \"" + which + "\"");
}

int arg_int(const CheckRequest& req, const char* key, int fallback) {
  if (!req.args.contains(key)) return fallback;
  return integer(req.args[key], "/checks/" + req.name + "/args/" + key);
}

EvidenceScenario arg_evidence(const CheckRequest& req) {
  EvidenceScenario scn;
  scn.beta = arg_set(req, "beta");
  const Json& paths = arg(req, "paths");
  if (!paths.is_array()) fail("/checks/" + req.name + "/args/paths", "expected an array of claim sets");
  for (std::size_t i = 0; i < paths.size(); ++i)
    scn.paths.push_back(claim_set_from_json(paths[i], "/checks/" + req.name + "/args/paths/" + std::to_string(i)));
  return scn;
}

AbductionQuery arg_abduction(const CheckRequest& req) {
  Claim observed = claim(arg(req, "observed"), "/checks/" + req.name + "/args/observed");
  Claim explanation = claim(arg(req, "explanation"), "/checks/" + req.name + "/args/explanation");
  return AbductionQuery{observed.question, observed.answer, explanation.question, explanation.answer};
}

const EmbeddingMap& need_E(const Scenario& s) {
  if (!s.E) throw DomainError("the scenario has no embedding map E");
  return *s.E;
}

CheckReport score_report(const std::string& name, const Score& sc, double epsilon) {
  CheckReport rep(name);
  rep.conclusion.holds = sc.high <= epsilon;
  rep.conclusion.lhs = Json{{"low", epsilon_json(sc.low)}, {"high", epsilon_json(sc.high)}};
  rep.conclusion.rhs = epsilon_json(epsilon);
  rep.details["verdict"] = verdict_at(sc, epsilon);
  rep.finish();
  return rep;
}

}  // namespace

CheckReport run_check(const Scenario& s, const CheckRequest& req, std::uint64_t seed, const VerifyOptions& opt) {
  (void)seed;
  const std::string& n = req.name;
  if (n == "validate") {
    auto v = validate(arg_sms(s, req));
    CheckReport rep("validate");
    rep.conclusion.holds = v.valid();
    rep.conclusion.lhs = v.violations;
    rep.finish();
    return rep;
  }
  if (n == "nonrepeating") return check_nonrepeating(arg_sms(s, req), arg_int(req, "k", 0));
  if (n == "backward_consistent") {
    const SmsSpec& spec = arg_sms(s, req);
    return check_backward_consistent(spec, arg_int(req, "kappa", spec.kappa.value_or(0)));
  }
  if (n == "honest") {
    const SmsSpec& spec = arg_sms(s, req);
    if (!s.psi || !s.Psi) throw DomainError("honesty needs psi and Psi");
    return is_honest(spec, arg_int(req, "step", s.step), *s.psi, *s.Psi, arg_str(req, "q"), arg_str(req, "v"),
                     arg_set(req, "C"));
  }
  if (n == "evidence_collection" || n == "nonthwarting" || n == "derive_monotone") {
    Law law = law_at(arg_sms(s, req), arg_int(req, "step", s.step));
    LawEvidence model(law, arg_str(req, "q"), arg_str(req, "target"));
    EvidenceScenario scn = arg_evidence(req);
    if (n == "evidence_collection") return is_evidence_collection(model, scn);
    if (n == "nonthwarting") return is_nonthwarting(model, scn);
    return derive_monotone(model, scn);
  }
  if (n == "embedding") {
    if (!s.sms2) throw DomainError("the embedding check needs sms2");
    return verify_embedding(law_at(s.sms1, kLimit), step_law(*s.sms2, s.step), need_E(s));
  }

  Setting st = setting_of(s);
  if (n == "prediction_pair") return is_prediction_pair(st, arg_str(req, "q"), arg_set(req, "C"));
  if (n == "calibration")
    return score_report("calibration", calibration_score(st, arg_str(req, "q"), arg_set(req, "C")), s.epsilon);
  if (n == "embedded_prediction_pair") {
    std::optional<Answer> v;
    if (req.args.contains("v")) v = arg_str(req, "v");
    return is_embedded_prediction_pair(st, need_E(s), arg_str(req, "q"), arg_set(req, "C"), v);
  }
  if (n == "embed_calibration")
    return score_report("embed-calibration",
                        embed_calibration_score(st, need_E(s), arg_str(req, "q"), arg_set(req, "C")), s.epsilon);
  if (n == "discriminating") return is_discriminating(st, need_E(s), arg_str(req, "q"), arg_set(req, "C"));
  if (n == "projection") return check_projection(st, need_E(s), arg_str(req, "q"), arg_set(req, "C"));
  if (n == "p73")
    return verify_evidence_math(st, arg_str(req, "q"), arg_evidence(req), arg_str(req, "target"), s.epsilon, opt);
  if (n == "p74")
    return verify_evidence_sci(st, need_E(s), arg_str(req, "q"), arg_evidence(req), arg_str(req, "target"),
                               s.epsilon, opt);
  if (n == "p75")
    return verify_evidence_sci_flipped(st, need_E(s), arg_str(req, "q"), arg_evidence(req), arg_str(req, "target"),
                                       s.epsilon, opt);
  if (n == "p81") return verify_abduction_math(st, arg_abduction(req), arg_set(req, "context"), s.epsilon, opt);
  if (n == "p82")
    return verify_abduction_sci_expect(st, need_E(s), arg_abduction(req), arg_set(req, "context"), s.epsilon, opt);
  if (n == "p83")
    return verify_abduction_sci_project(st, need_E(s), arg_abduction(req), arg_set(req, "universe_context"),
                                        s.epsilon, opt);
  fail("/checks", "unknown check \"" + n + "\"");
}

RunReport run_scenario(const Scenario& s, std::uint64_t seed, const VerifyOptions& opt,
                       const std::optional<std::string>& only, bool timing) {
  RunReport r;
  r.scenario_digest = digest(s);
  r.seed = seed;
  Json times = Json::array();
  for (const auto& req : s.checks) {
    if (only && req.name != *only) continue;
    auto t0 = std::chrono::steady_clock::now();
    r.reports.push_back(run_check(s, req, seed, opt));
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(Json{{"name", req.name},
                         {"ms", std::chrono::duration<double, std::milli>(t1 - t0).count()}});
  }
  if (timing) r.timing = times;
  return r;
}

}  // namespace smslab
