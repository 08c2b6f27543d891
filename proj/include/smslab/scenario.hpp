#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smslab/calibration.hpp"
#include "smslab/divergence.hpp"
#include "smslab/embedding_map.hpp"
#include "smslab/evidence.hpp"
#include "smslab/report.hpp"
#include "smslab/sms.hpp"

namespace smslab {

struct CheckRequest {
  std::string name;
  Json args = Json::object();
  bool operator==(const CheckRequest&) const = default;
};

struct Scenario {
  int schema = 1;
  SmsSpec sms1;
  std::optional<SmsSpec> sms2;
  std::optional<PsiMap> psi;
  std::optional<PsiInterp> Psi;
  std::optional<EmbeddingMap> E;
  DivergenceKind divergence = DivergenceKind::KL;
  double epsilon = 0;
  int step = 1;
  Rational tol = rat(1, 1000000);
  std::vector<CheckRequest> checks;
  bool operator==(const Scenario&) const = default;
};

// Throws ParseError with a byte position (syntax) or a JSON path (content).
[[nodiscard]] Scenario parse_scenario(const std::string& text);
[[nodiscard]] Scenario scenario_from_json(const Json& j);
// Canonical form: fixed key order, sets in canonical order, rationals as "a/b" strings.
[[nodiscard]] Json to_json(const Scenario& s);
[[nodiscard]] std::string serialize(const Scenario& s);
// SHA-256 (hex) of the compact canonical serialization.
[[nodiscard]] std::string digest(const Scenario& s);

[[nodiscard]] Json to_json(const SmsSpec& spec);
[[nodiscard]] SmsSpec sms_from_json(const Json& j, const std::string& path = "");
[[nodiscard]] Json claim_set_json(const ClaimSet& s);
[[nodiscard]] ClaimSet claim_set_from_json(const Json& j, const std::string& path = "");
[[nodiscard]] Json dist_json(const Dist& d);

// Oracle sms1 at its limit, reasoner sms2 at `step`. Throws DomainError when sms2, psi or Psi is missing.
[[nodiscard]] Setting setting_of(const Scenario& s);

struct RunReport {
  int schema = 1;
  std::string scenario_digest;
  std::uint64_t seed = 0;
  std::vector<CheckReport> reports;
  std::optional<Json> timing;
  bool operator==(const RunReport&) const = default;
};
[[nodiscard]] Json to_json(const RunReport& r);
[[nodiscard]] RunReport run_report_from_json(const Json& j);

// Names accepted in checks[]: validate, nonrepeating, backward_consistent, prediction_pair, calibration,
// honest, embedding, embedded_prediction_pair, embed_calibration, discriminating, projection,
// evidence_collection, nonthwarting, derive_monotone, p73, p74, p75, p81, p82, p83.
[[nodiscard]] CheckReport run_check(const Scenario& s, const CheckRequest& req, std::uint64_t seed,
                                    const VerifyOptions& opt = {});
// Runs every check (or only those named `only`), in checks[] order.
[[nodiscard]] RunReport run_scenario(const Scenario& s, std::uint64_t seed, const VerifyOptions& opt = {},
                                     const std::optional<std::string>& only = std::nullopt,
                                     bool timing = false);

}  // namespace smslab
