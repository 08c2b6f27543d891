#include "smslab/report.hpp"

#include <cmath>
#include <limits>

#include <stdexcept>

namespace smslab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Verified:
      return "verified";
    case Verdict::PreconditionFailed:
      return "precondition-failed";
    case Verdict::Refuted:
      return "refuted";
  }
  return "precondition-failed";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "verified") return Verdict::Verified;
  if (s == "precondition-failed") return Verdict::PreconditionFailed;
  if (s == "refuted") return Verdict::Refuted;
  throw std::invalid_argument("unknown verdict: " + s);
}

void CheckReport::require(std::string label, bool holds, Json witness) {
  preconditions.push_back(Precondition{std::move(label), holds, std::move(witness)});
}

bool CheckReport::preconditions_hold() const {
  for (const auto& p : preconditions)
    if (!p.holds) return false;
  return true;
}

const Precondition* CheckReport::find(const std::string& label) const {
  for (const auto& p : preconditions)
    if (p.label == label) return &p;
  return nullptr;
}

void CheckReport::finish() {
  if (!preconditions_hold())
    verdict = Verdict::PreconditionFailed;
  else
    verdict = conclusion.holds ? Verdict::Verified : Verdict::Refuted;
}

Json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j) {
  if (j.is_string()) {
    if (j == "inf") return std::numeric_limits<double>::infinity();
    if (j == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

Json to_json(const CheckReport& r) {
  Json pre = Json::array();
  for (const auto& p : r.preconditions)
    pre.push_back(Json{{"label", p.label}, {"holds", p.holds}, {"witness", p.witness}});
  Json j;
  j["name"] = r.name;
  j["preconditions"] = pre;
  j["conclusion"] = Json{{"holds", r.conclusion.holds},
                         {"lhs", r.conclusion.lhs},
                         {"rhs", r.conclusion.rhs},
                         {"margin", r.conclusion.margin}};
  j["verdict"] = to_string(r.verdict);
  j["details"] = r.details;
  return j;
}

CheckReport check_report_from_json(const Json& j) {
  CheckReport r(j.at("name").get<std::string>());
  for (const auto& p : j.at("preconditions"))
    r.preconditions.push_back(
        Precondition{p.at("label").get<std::string>(), p.at("holds").get<bool>(), p.at("witness")});
  const auto& c = j.at("conclusion");
  r.conclusion = Conclusion{c.at("holds").get<bool>(), c.at("lhs"), c.at("rhs"), c.at("margin")};
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.details = j.contains("details") ? j.at("details") : Json::object();
  return r;
}

}  // namespace smslab
