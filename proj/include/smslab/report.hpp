#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace smslab {

using Json = nlohmann::ordered_json;

enum class Verdict { Verified, PreconditionFailed, Refuted };

[[nodiscard]] std::string to_string(Verdict v);
[[nodiscard]] Verdict verdict_from_string(const std::string& s);

struct Precondition {
  std::string label;
  bool holds = false;
  Json witness;
  bool operator==(const Precondition&) const = default;
};

struct Conclusion {
  bool holds = false;
  Json lhs;
  Json rhs;
  Json margin;
  bool operator==(const Conclusion&) const = default;
};

struct CheckReport {
  std::string name;
  std::vector<Precondition> preconditions;
  Conclusion conclusion;
  Verdict verdict = Verdict::PreconditionFailed;
  Json details = Json::object();

  CheckReport() = default;
  explicit CheckReport(std::string n) : name(std::move(n)) {}

  void require(std::string label, bool holds, Json witness = nullptr);
  [[nodiscard]] bool preconditions_hold() const;
  [[nodiscard]] const Precondition* find(const std::string& label) const;
  // Sets the verdict from the preconditions and the conclusion.
  void finish();
  bool operator==(const CheckReport&) const = default;
};

// Finite doubles as JSON numbers; infinities as the strings "inf" / "-inf".
[[nodiscard]] Json number_json(double x);
[[nodiscard]] double number_from_json(const Json& j);

[[nodiscard]] Json to_json(const CheckReport& r);
[[nodiscard]] CheckReport check_report_from_json(const Json& j);

}  // namespace smslab
