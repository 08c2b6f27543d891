#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "smslab/errors.hpp"
#include "smslab/scenario.hpp"
#include "support.hpp"

using namespace smslab;

namespace {

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(SMSLAB_FIXTURE_DIR))
    if (e.path().extension() == ".json") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string parse_message(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"({"sms1": {"questions": ["qa"], "answers": ["0", "1"], "mode": "per-step",
  "steps": [[{"vector": [["qa", "0"]], "p": "1/2"}, {"vector": [["qa", "1"]], "p": "1/2"}]]}})";

}  // namespace

TEST_CASE("every fixture round-trips through the canonical form") {
  auto names = fixture_names();
  REQUIRE(names.size() >= 10);
  for (const auto& name : names) {
    CAPTURE(name);
    Scenario s = testsupport::load_fixture(name);
    std::string once = serialize(s);
    Scenario back = parse_scenario(once);
    CHECK(back == s);
    CHECK(serialize(back) == once);
    CHECK(digest(back) == digest(s));
  }
}

TEST_CASE("run reports round-trip and are byte-identical across runs") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    Scenario s = testsupport::load_fixture(name);
    RunReport r = run_scenario(s, 7);
    CHECK(r.scenario_digest == digest(s));
    Json j = to_json(r);
    CHECK(run_report_from_json(j) == r);
    CHECK(to_json(run_scenario(s, 7)).dump() == j.dump());
  }
}

TEST_CASE("timing is only present on request") {
  Scenario s = testsupport::load_fixture("fix_a.json");
  CHECK_FALSE(run_scenario(s, 0).timing.has_value());
  CHECK(run_scenario(s, 0, {}, std::nullopt, true).timing.has_value());
  CHECK(run_scenario(s, 0, {}, std::string("validate")).reports.size() == 1);
}

TEST_CASE("syntax errors carry a byte position") {
  std::string text = R"({"sms1": {"questions": ["qa"],, }})";
  std::string msg = parse_message(text);
  CHECK(msg.find("syntax error at byte 31") != std::string::npos);
}

TEST_CASE("content errors carry a JSON path") {
  std::string bad_sum = kMinimal;
  bad_sum.replace(bad_sum.find("\"1/2\"}]"), 5, "\"1/3\"");
  std::string msg = parse_message(bad_sum);
  CHECK(msg.find("/sms1") == 0);
  CHECK(msg.find("table sums to 5/6") != std::string::npos);

  Json j = Json::parse(kMinimal);
  j["sms2"] = j["sms1"];
  j["psi"] = Json{{"map", Json{{"qa", Json::array({"qz"})}}}, {"invertible", true}};
  msg = parse_message(j.dump());
  CHECK(msg.find("/psi/map/qa") == 0);
  CHECK(msg.find("unknown question \"qz\"") != std::string::npos);

  Json k = Json::parse(kMinimal);
  k["sms1"]["mode"] = "markov";
  CHECK(parse_message(k.dump()).find("/sms1/mode") == 0);

  Json e = Json::parse(kMinimal);
  e["epsilon"] = "lots";
  CHECK(parse_message(e.dump()).find("/epsilon") == 0);

  Json schema = Json::parse(kMinimal);
  schema["schema"] = 2;
  CHECK(parse_message(schema.dump()).find("/schema") == 0);

  CHECK(parse_message("[1, 2]").find("/") == 0);
}

TEST_CASE("defaults and infinite epsilon") {
  Scenario s = parse_scenario(kMinimal);
  CHECK(s.schema == 1);
  CHECK(s.divergence == DivergenceKind::KL);
  CHECK(s.epsilon == 0);
  CHECK(s.step == 1);
  CHECK(s.tol == rat(1, 1000000));
  Json j = Json::parse(kMinimal);
  j["epsilon"] = "inf";
  Scenario inf = parse_scenario(j.dump());
  CHECK(std::isinf(inf.epsilon));
  CHECK(to_json(inf)["epsilon"] == "inf");
  CHECK(parse_scenario(serialize(inf)) == inf);
}

TEST_CASE("digest is stable and sensitive") {
  Scenario s = testsupport::load_fixture("fix_b.json");
  std::string d = digest(s);
  CHECK(d.size() == 64);
  CHECK(d == digest(parse_scenario(testsupport::read_file(testsupport::fixture_path("fix_b.json")))));
  // Reordering keys does not change the digest; changing a value does.
  Json j = Json::parse(testsupport::read_file(testsupport::fixture_path("fix_b.json")));
  Json reordered = Json::object();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) reordered[*it] = j[*it];
  CHECK(digest(parse_scenario(reordered.dump())) == d);
  Scenario changed = s;
  changed.epsilon = 0.5;
  CHECK(digest(changed) != d);
}

TEST_CASE("unknown checks and missing pieces") {
  Scenario s = testsupport::load_fixture("fix_a.json");
  CHECK_THROWS_AS((void)run_check(s, CheckRequest{"no_such_check", Json::object()}, 0), SmsError);
  CHECK_THROWS_AS((void)setting_of(s), DomainError);
  CHECK_THROWS_AS((void)run_check(s, CheckRequest{"embedding", Json::object()}, 0), DomainError);
}
