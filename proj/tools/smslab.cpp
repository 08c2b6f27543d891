#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "smslab/embedding.hpp"
#include "smslab/errors.hpp"
#include "smslab/generators.hpp"
#include "smslab/law.hpp"
#include "smslab/scenario.hpp"

using namespace smslab;

namespace {

struct Common {
  std::string scenario_path;
  std::string format = "text";
  std::uint64_t seed = 0;
  std::string divergence;
  std::string epsilon;
  std::string tol;
  bool no_embed_check = false;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c, bool needs_scenario = true) {
  auto* opt = sub->add_option("--scenario", c.scenario_path, "scenario JSON file");
  if (needs_scenario) opt->required();
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "text"}));
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--divergence", c.divergence, "kl, tv or js")->check(CLI::IsMember({"kl", "tv", "js"}));
  sub->add_option("--epsilon", c.epsilon, "calibration threshold (number or inf)");
  sub->add_option("--tol", c.tol, "limit bracket tolerance (rational)");
  sub->add_flag("--no-embed-check", c.no_embed_check, "skip the embedding identity hypothesis");
  sub->add_flag("--timing", c.timing, "include per-check timing");
}

Scenario load(const Common& c) {
  std::ifstream in(c.scenario_path);
  if (!in) throw ParseError("cannot read " + c.scenario_path);
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str());
  if (!c.divergence.empty()) s.divergence = divergence_from_string(c.divergence);
  if (!c.epsilon.empty()) s.epsilon = number_from_json(Json(c.epsilon == "inf" ? Json("inf") : Json(std::stod(c.epsilon))));
  if (!c.tol.empty()) s.tol = parse_rational(c.tol);
  return s;
}

VerifyOptions options(const Common& c) {
  VerifyOptions opt;
  opt.embed_check = !c.no_embed_check;
  return opt;
}

ClaimSet parse_set(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("--set: ") + e.what());
  }
  return claim_set_from_json(j, "--set");
}

QuestionVector parse_questions(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("--qs: ") + e.what());
  }
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) throw ParseError("--qs: expected a question or an array of questions");
  QuestionVector out;
  for (const auto& q : j) out.push_back(q.get<std::string>());
  return out;
}

const SmsSpec& pick_sms(const Scenario& s, const std::string& which) {
  if (which == "sms1") return s.sms1;
  if (which == "sms2" && s.sms2) return *s.sms2;
  throw DomainError("scenario has no " + which);
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

// Exit 0 when every report is verified, else 1.
int emit_run(const RunReport& r, const std::string& format) {
  bool ok = true;
  for (const auto& rep : r.reports) ok = ok && rep.verdict == Verdict::Verified;
  if (format == "json") {
    emit(to_json(r));
  } else {
    for (const auto& rep : r.reports) {
      std::cout << rep.name << ": " << to_string(rep.verdict) << "\n";
      for (const auto& p : rep.preconditions)
        if (!p.holds) std::cout << "  failed: " << p.label << "\n";
      std::cout << "  conclusion: " << (rep.conclusion.holds ? "holds" : "fails") << " (" << rep.conclusion.lhs
                << " vs " << rep.conclusion.rhs << ")\n";
    }
    if (r.reports.empty()) std::cout << "no matching checks\n";
  }
  return ok ? 0 : 1;
}

RunReport single(const Scenario& s, const CheckReport& rep, std::uint64_t seed) {
  RunReport r;
  r.scenario_digest = digest(s);
  r.seed = seed;
  r.reports.push_back(rep);
  return r;
}

RunReport run_group(const Scenario& s, const Common& c, const std::set<std::string>& names,
                    const std::optional<std::string>& prop) {
  RunReport all = run_scenario(s, c.seed, options(c), prop, c.timing);
  if (prop || names.empty()) return all;
  RunReport r = all;
  r.reports.clear();
  for (const auto& rep : all.reports)
    if (names.count(rep.name)) r.reports.push_back(rep);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smslab: exact analysis of finite stochastic mathematical systems"};
  app.require_subcommand(1);

  Common c;
  int step = 1;
  std::string set_text = "[]", qs_text, which = "sms1", question, prop, kind, ablate = "none", out_path;
  bool exact = false;
  long trials = 10000;

  auto* validate = app.add_subcommand("validate", "validate every SMS in the scenario");
  add_common(validate, c);

  auto* dist = app.add_subcommand("dist", "superset, exact or question probability at a step");
  add_common(dist, c);
  dist->add_option("--step", step, "step (0 = limit)");
  dist->add_option("--set", set_text, "claim set as JSON [[q, a], ...]");
  dist->add_option("--sms", which, "sms1 or sms2");
  dist->add_option("--qs", qs_text, "questions that must be asked (JSON)");
  dist->add_flag("--exact", exact, "probability that the output equals the set");

  auto* limit = app.add_subcommand("limit", "limit probability bracket");
  add_common(limit, c);
  limit->add_option("--set", set_text, "claim set as JSON");
  limit->add_option("--sms", which, "sms1 or sms2");

  auto* respond = app.add_subcommand("respond", "response distribution");
  add_common(respond, c);
  respond->add_option("--step", step, "step (0 = limit)");
  respond->add_option("--qs", qs_text, "question or questions (JSON)")->required();
  respond->add_option("--set", set_text, "conditioning claim set");
  respond->add_option("--sms", which, "sms1 or sms2");

  auto* calibrate = app.add_subcommand("calibrate", "calibration score of the reasoner");
  add_common(calibrate, c);
  calibrate->add_option("--q", question, "reasoner question")->required();
  calibrate->add_option("--set", set_text, "conditioning claim set");

  auto* embed = app.add_subcommand("embed", "embedding checks in the scenario (or the identity alone)");
  add_common(embed, c);

  auto* evidence = app.add_subcommand("evidence", "evidence checks in the scenario");
  add_common(evidence, c);

  auto* abduct = app.add_subcommand("abduct", "abduction checks in the scenario");
  add_common(abduct, c);

  auto* verify = app.add_subcommand("verify", "run the scenario's checks");
  add_common(verify, c);
  verify->add_option("--prop", prop, "only checks with this name");

  auto* construct = app.add_subcommand("construct", "emit an epsilon = 0 constructor scenario");
  add_common(construct, c, false);
  construct->add_option("--kind", kind, "p73 p74 p75 p81 p82 p83 projection")->required();
  construct->add_option("--out", out_path, "write the scenario here instead of standard output");

  auto* search = app.add_subcommand("search", "counterexample search with one hypothesis ablated");
  add_common(search, c, false);
  search->add_option("--prop", prop, "p73 p74 p75 p81 p82 p83")->required();
  search->add_option("--ablate", ablate, "hypothesis label or none");
  search->add_option("--trials", trials, "trial budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      Scenario s = load(c);
      Json out = Json::object();
      bool ok = true;
      for (const char* name : {"sms1", "sms2"}) {
        if (std::string(name) == "sms2" && !s.sms2) continue;
        auto rep = smslab::validate(pick_sms(s, name));
        ok = ok && rep.violations.empty();
        out[name] = rep.violations;
      }
      if (c.format == "json") emit(out);
      else std::cout << (ok ? "valid" : out.dump()) << "\n";
      return ok ? 0 : 1;
    }
    if (*dist) {
      Scenario s = load(c);
      const SmsSpec& spec = pick_sms(s, which);
      ClaimSet set = parse_set(set_text);
      Law law = law_at(spec, step);
      Rational value;
      if (exact) {
        value = prob_equal(law, set);
      } else {
        Event e{set, qs_text.empty() ? QuestionVector{} : parse_questions(qs_text), std::nullopt};
        value = prob_value(law, e);
      }
      if (c.format == "json") emit(Json{{"value", to_string(value)}, {"float", to_double(value)}});
      else std::cout << to_string(value) << "\n";
      return 0;
    }
    if (*limit) {
      Scenario s = load(c);
      LimitValue lv = limit_prob(pick_sms(s, which), parse_set(set_text), s.tol);
      Json out{{"value", to_string(lv.value)}, {"lower", to_string(lv.lower)}, {"upper", to_string(lv.upper)},
               {"step", lv.step}};
      if (c.format == "json") emit(out);
      else std::cout << to_string(lv.value) << " [" << to_string(lv.lower) << ", " << to_string(lv.upper) << "]\n";
      return 0;
    }
    if (*respond) {
      Scenario s = load(c);
      Law law = law_at(pick_sms(s, which), step);
      Dist d = cond_answers(law, parse_questions(qs_text), Event{parse_set(set_text), {}, std::nullopt});
      if (c.format == "json") emit(Json{{"dist", dist_json(d)}, {"sure", is_sure(d)}});
      else std::cout << to_string(d) << (is_sure(d) ? " (sure)" : "") << "\n";
      return 0;
    }
    if (*calibrate) {
      Scenario s = load(c);
      Setting st = setting_of(s);
      ClaimSet set = parse_set(set_text);
      CheckReport pair = is_prediction_pair(st, question, set);
      if (!pair.conclusion.holds) {
        if (c.format == "json") emit(to_json(pair));
        else std::cout << "not a prediction pair\n";
        return 1;
      }
      Score score = calibration_score(st, question, set);
      std::string verdict = verdict_at(score, s.epsilon);
      if (c.format == "json")
        emit(Json{{"score_low", number_json(score.low)}, {"score_high", number_json(score.high)},
                  {"epsilon", number_json(s.epsilon)}, {"verdict", verdict}});
      else
        std::cout << score.low << (score.determinate() ? "" : " .. " + std::to_string(score.high)) << " " << verdict
                  << "\n";
      return verdict == "calibrated" ? 0 : 1;
    }
    if (*embed) {
      Scenario s = load(c);
      RunReport r = run_group(s, c, {"embedding", "embedded_prediction_pair", "embed_calibration", "discriminating",
                                     "projection"}, std::nullopt);
      if (r.reports.empty() && s.E && s.sms2) r = single(s, run_check(s, CheckRequest{"embedding", Json::object()}, c.seed), c.seed);
      return emit_run(r, c.format);
    }
    if (*evidence) {
      Scenario s = load(c);
      return emit_run(run_group(s, c, {"evidence_collection", "nonthwarting", "derive_monotone", "p73", "p74", "p75"},
                                std::nullopt),
                      c.format);
    }
    if (*abduct) {
      Scenario s = load(c);
      return emit_run(run_group(s, c, {"p81", "p82", "p83"}, std::nullopt), c.format);
    }
    if (*verify) {
      Scenario s = load(c);
      return emit_run(run_group(s, c, {}, prop.empty() ? std::nullopt : std::optional<std::string>(prop)), c.format);
    }
    if (*construct) {
      Constructed k = construct_eps0(kind, c.seed);
      std::string text = serialize(k.scenario);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream(out_path) << text;
      }
      if (k.alpha) std::cerr << "alpha " << to_string(*k.alpha) << "\n";
      return 0;
    }
    if (*search) {
      SearchResult r = counterexample_search(prop, ablate, trials, c.seed);
      Json out{{"found", r.found}, {"trials", r.trials}};
      if (r.scenario) out["scenario"] = to_json(*r.scenario);
      if (r.report) out["report"] = to_json(*r.report);
      if (c.format == "json") emit(out);
      else std::cout << (r.found ? "found" : "not found") << " after " << r.trials << " trials\n";
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const SmsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
