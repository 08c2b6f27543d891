// Acceptance runner: one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "smslab/abduction.hpp"
#include "smslab/embedding.hpp"
#include "smslab/errors.hpp"
#include "smslab/evidence.hpp"
#include "smslab/generators.hpp"
#include "support.hpp"

using namespace smslab;
using testsupport::cl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(3);
  out << x;
  return out.str();
}

// Sum of rows whose vector contains every listed claim.
Rational table_mass(const Table& rows, const std::vector<Claim>& need) {
  Rational total = 0;
  for (const auto& r : rows) {
    bool all = true;
    for (const auto& c : need) all = all && std::find(r.vector.begin(), r.vector.end(), c) != r.vector.end();
    if (all) total += r.p;
  }
  return total;
}

// Sum of rows that ask `q` and contain every listed claim.
Rational table_asks(const Table& rows, const Question& q, const std::vector<Claim>& need) {
  Rational total = 0;
  for (const auto& r : rows) {
    bool all = std::any_of(r.vector.begin(), r.vector.end(), [&](const Claim& c) { return c.question == q; });
    for (const auto& c : need) all = all && std::find(r.vector.begin(), r.vector.end(), c) != r.vector.end();
    if (all) total += r.p;
  }
  return total;
}

Profile kernel_profile() {
  Profile p;
  p.kernel = true;
  p.questions = 3;
  p.answers = 2;
  p.horizon = 6;
  return p;
}

// 1. P^j(C) non-decreasing for j > kappa.
Outcome monotonicity() {
  auto t0 = Clock::now();
  long violations = 0, mismatches = 0, comparisons = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SmsSpec spec = random_backward_consistent(kernel_profile(), seed);
    int kappa = spec.kappa.value_or(0);
    std::vector<std::map<std::set<Claim>, Rational>> laws;
    std::set<std::set<Claim>> closure;
    for (int n = 1; n <= spec.horizon; ++n) {
      laws.push_back(testsupport::oracle_step(spec, n));
      for (const auto& s : testsupport::support_closure(laws.back())) closure.insert(s);
    }
    for (const auto& s : closure) {
      ClaimSet cs(s.begin(), s.end());
      std::vector<Rational> values;
      for (int n = 1; n <= spec.horizon; ++n) {
        Rational v = prob_superset(spec, n, cs);
        if (v != testsupport::oracle_superset(laws[n - 1], s)) ++mismatches;
        values.push_back(v);
      }
      for (int j = kappa + 1; j < spec.horizon; ++j) {
        ++comparisons;
        if (values[j - 1] > values[j]) ++violations;
      }
    }
  }
  double secs = seconds_since(t0);
  return {violations == 0 && mismatches == 0 && secs < 60,
          std::to_string(comparisons) + " comparisons, " + std::to_string(violations) + " violations, " +
              std::to_string(mismatches) + " engine/enumeration mismatches, " + fmt(secs) + " s"};
}

// 2. Dominance and decomposition on the same scenarios.
Outcome dominance() {
  auto t0 = Clock::now();
  long violations = 0, checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SmsSpec spec = random_backward_consistent(kernel_profile(), seed);
    for (int n = 1; n <= spec.horizon; ++n) {
      auto law = testsupport::oracle_step(spec, n);
      auto closure = testsupport::support_closure(law);
      std::map<std::set<Claim>, Rational> exact;
      for (const auto& t : closure) exact[t] = prob_exact(spec, n, ClaimSet(t.begin(), t.end()));
      for (const auto& s : closure) {
        ++checked;
        Rational sup = prob_superset(spec, n, ClaimSet(s.begin(), s.end()));
        if (exact[s] > sup) ++violations;
        if (exact[s] != testsupport::oracle_exact(law, s)) ++violations;
        Rational sum = 0;
        for (const auto& t : closure)
          if (testsupport::contains_all(t, s)) sum += exact[t];
        if (sum != sup) ++violations;
      }
    }
  }
  double secs = seconds_since(t0);
  return {violations == 0, std::to_string(checked) + " claim sets, " + std::to_string(violations) + " violations, " +
                               fmt(secs) + " s"};
}

// 3. Premise and implication factors agree on always-asked tables.
Outcome abduction_algebra() {
  auto t0 = Clock::now();
  const AbductionQuery aq{"o", "1", "e", "1"};
  long violations = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    SmsSpec spec = random_always_asked(seed, aq, 2 + static_cast<int>(seed % 3));
    Law law = step_law(spec, 1);
    const Table& rows = spec.steps[0];
    for (const ClaimSet& context : {ClaimSet{}, ClaimSet{cl("z", "0")}, ClaimSet{cl("z", "1")}}) {
      AbductionAlpha a = abduction_alpha(law, aq, context);
      std::vector<Claim> ctx(context.begin(), context.end());
      auto with = [&](std::vector<Claim> extra) {
        extra.insert(extra.end(), ctx.begin(), ctx.end());
        return extra;
      };
      Rational premise = table_mass(rows, with({cl("o", "1"), cl("e", "1")})) / table_mass(rows, with({cl("e", "1")})) /
                         (table_mass(rows, with({cl("o", "1")})) / table_mass(rows, ctx));
      Rational implication = table_mass(rows, with({cl("o", "1"), cl("e", "1")})) /
                             table_mass(rows, with({cl("o", "1")})) /
                             (table_mass(rows, with({cl("e", "1")})) / table_mass(rows, ctx));
      if (a.premise != a.implication || a.premise != premise || a.implication != implication) ++violations;
    }
  }
  double secs = seconds_since(t0);
  return {violations == 0 && secs < 10,
          "3000 (table, context) pairs, " + std::to_string(violations) + " violations, " + fmt(secs) + " s"};
}

// 4. Constructor scenarios verify at epsilon 0 with strict conclusions.
Outcome soundness() {
  auto t0 = Clock::now();
  long failures = 0, lift_mismatch = 0;
  std::string first;
  for (const std::string kind : {"p73", "p74", "p75", "p81", "p82", "p83", "projection"})
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      Constructed c = construct_eps0(kind, seed);
      for (const auto& req : c.scenario.checks) {
        CheckReport r = run_check(c.scenario, req, seed);
        bool ok = r.verdict == Verdict::Verified;
        if (kind != "projection")
          ok = ok && r.details.contains("margin_float") && r.details["margin_float"].get<double>() > 0;
        if ((kind == "p81" || kind == "p83") && ok) {
          bool same = r.details.contains("lift") && c.alpha &&
                      parse_rational(r.details["lift"].get<std::string>()) == *c.alpha;
          if (!same) ++lift_mismatch;
        }
        if (!ok) {
          ++failures;
          if (first.empty()) first = kind + " seed " + std::to_string(seed);
        }
      }
    }
  double secs = seconds_since(t0);
  std::string detail = "350 scenarios, " + std::to_string(failures) + " not verified or not strict, " +
                       std::to_string(lift_mismatch) + " lift mismatches, " + fmt(secs) + " s";
  if (!first.empty()) detail += ", first failure " + first;
  return {failures == 0 && lift_mismatch == 0 && secs < 300, detail};
}

// 5. Each ablated hypothesis admits a counterexample.
Outcome non_vacuity() {
  bool pass = true;
  std::string detail;
  for (const auto& [prop, ablate] : std::vector<std::pair<std::string, std::string>>{
           {"p73", "calibration"}, {"p81", "premise"}, {"p75", "5"}}) {
    auto t0 = Clock::now();
    SearchResult r = counterexample_search(prop, ablate, 10000, 3);
    double secs = seconds_since(t0);
    bool ok = r.found && r.report && !r.report->conclusion.holds && secs < 120;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + prop + " without " + ablate + ": " +
              (r.found ? "found at trial " + std::to_string(r.trials) : "not found in " + std::to_string(r.trials)) +
              " (" + fmt(secs) + " s)";
  }
  return {pass, detail};
}

// 6. Embedding identity on image processes, and recovery of an injected residual.
Outcome embedding_identity() {
  long clean_fail = 0, perturbed_fail = 0, perturbed = 0;
  double worst_error = 0;
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; perturbed < 100 || seed < 100; ++seed) {
    Scenario s = random_embedding_instance(seed);
    Law universe = limit_law(s.sms1);
    if (seed < 100) {
      CheckReport r = verify_embedding(universe, step_law(*s.sms2, 1), *s.E);
      bool ok = r.verdict == Verdict::Verified;
      for (const auto& row : r.details["residuals"]) {
        Rational width = parse_rational(row["universe"]["upper"].get<std::string>()) -
                         parse_rational(row["universe"]["lower"].get<std::string>());
        ok = ok && parse_rational(row["residual"].get<std::string>()) <= width;
      }
      if (!ok) ++clean_fail;
    }
    if (perturbed >= 100) continue;
    Table& rows = s.sms2->steps[0];
    if (rows.size() < 2) continue;
    ++perturbed;
    std::size_t from = rng() % rows.size(), to = (from + 1 + rng() % (rows.size() - 1)) % rows.size();
    Rational delta = rows[from].p * rat(1 + static_cast<long>(rng() % 99), 100);
    rows[from].p -= delta;
    rows[to].p += delta;
    CheckReport r = verify_embedding(universe, step_law(*s.sms2, 1), *s.E);
    double error = std::abs(r.details["max_residual_float"].get<double>() - to_double(delta));
    worst_error = std::max(worst_error, error);
    if (r.conclusion.holds || error > 1e-9) ++perturbed_fail;
  }
  return {clean_fail == 0 && perturbed_fail == 0,
          "100 image processes, " + std::to_string(clean_fail) + " failures; " + std::to_string(perturbed) +
              " perturbed, " + std::to_string(perturbed_fail) + " not detected or misreported, worst residual error " +
              fmt(worst_error)};
}

// 7. Projection identity: Psi against image ratios read straight off the scientist's table.
Outcome projection() {
  long failures = 0, rows_checked = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Scenario s = construct_eps0("projection", seed).scenario;
    Setting st = setting_of(s);
    ClaimSet context = claim_set_from_json(s.checks[0].args["C"]);
    bool ok = is_discriminating(st, *s.E, "q", context).verdict == Verdict::Verified;
    ok = ok && check_projection(st, *s.E, "q", context).verdict == Verdict::Verified;
    const Table& scientist = s.sms2->steps[s.step - 1];
    std::vector<Claim> ctx(context.begin(), context.end());
    for (const auto& [key, dist] : s.Psi->table) {
      std::vector<Claim> given = ctx;
      given.push_back(cl("q", key.second));
      Rational denom = table_asks(scientist, "o", given);
      if (denom == 0) continue;
      for (const auto& [outcome, p] : dist) {
        std::vector<Claim> with = given;
        with.push_back(cl("o", outcome[0]));
        ++rows_checked;
        if (table_mass(scientist, with) / denom != p) ok = false;
      }
    }
    if (!ok) ++failures;
  }
  return {failures == 0 && rows_checked > 0,
          "25 scenarios, " + std::to_string(rows_checked) + " table entries compared, " + std::to_string(failures) +
              " failures"};
}

// 8. Monte Carlo interval coverage.
Outcome monte_carlo() {
  auto t0 = Clock::now();
  std::vector<std::pair<SmsSpec, ClaimSet>> cases;
  cases.emplace_back(testsupport::load_fixture("fix_b.json").sms1, ClaimSet{cl("qa", "0")});
  Profile p;
  for (std::uint64_t seed = 0; cases.size() < 21; ++seed) {
    SmsSpec spec = random_sms(p, seed);
    auto law = testsupport::oracle_step(spec, 1);
    // The closure set whose probability is nearest 1/2.
    std::set<Claim> best;
    double gap = 2;
    for (const auto& s : testsupport::support_closure(law)) {
      double g = std::abs(to_double(testsupport::oracle_superset(law, s)) - 0.5);
      if (g < gap) gap = g, best = s;
    }
    cases.emplace_back(spec, ClaimSet(best.begin(), best.end()));
  }
  long worst = 100;
  for (const auto& [spec, set] : cases) {
    double exact = to_double(testsupport::oracle_superset(testsupport::oracle_step(spec, 1),
                                                          std::set<Claim>(set.begin(), set.end())));
    long inside = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
      McEstimate e = mc_estimate(spec, 1, set, 100000, run);
      if (std::abs(e.estimate - exact) <= 4 * e.std_error + 1e-15) ++inside;
    }
    worst = std::min(worst, inside);
  }
  double secs = seconds_since(t0);
  return {worst >= 99, "21 scenarios, fewest runs inside the interval " + std::to_string(worst) + "/100, " +
                           fmt(secs) + " s"};
}

// 9. Per-path lift plus non-thwarting implies the cumulative chain.
Outcome evidence_chain() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> base(1, 8), boost(1, 4);
  long qualifying = 0, violations = 0, attempts = 0, disagreements = 0;
  while (qualifying < 500 && attempts < 200000) {
    ++attempts;
    int paths = 2 + static_cast<int>(rng() % 2);
    Table rows;
    Rational total = 0;
    for (int v = 0; v < 2; ++v)
      for (int mask = 0; mask < (1 << paths); ++mask) {
        ClaimVector vec{cl("b", "1"), cl("q", std::to_string(v))};
        Rational w = base(rng);
        for (int k = 0; k < paths; ++k) {
          int bit = mask >> k & 1;
          vec.push_back(cl("e" + std::to_string(k + 1), std::to_string(bit)));
          if (bit == v) w *= boost(rng);
        }
        total += w;
        rows.push_back(Row{vec, w});
      }
    for (auto& r : rows) r.p /= total;

    // Conditionals straight from the table.
    auto with_paths = [&](const std::vector<int>& ks, std::vector<Claim> extra) {
      extra.push_back(cl("b", "1"));
      for (int k : ks) extra.push_back(cl("e" + std::to_string(k), "1"));
      return extra;
    };
    auto target = [&](const std::vector<int>& ks) -> Rational {
      return table_mass(rows, with_paths(ks, {cl("q", "1")})) / table_asks(rows, "q", with_paths(ks, {}));
    };
    auto given_q = [&](const std::vector<int>& ks) -> Rational {
      return table_asks(rows, "q", with_paths(ks, {})) / table_asks(rows, "q", with_paths({}, {}));
    };
    auto given_t = [&](const std::vector<int>& ks) -> Rational {
      return table_mass(rows, with_paths(ks, {cl("q", "1")})) / table_mass(rows, with_paths({}, {cl("q", "1")}));
    };
    bool lift = true, thwart_free = true;
    for (int i = 1; i <= paths; ++i) lift = lift && target({i}) > target({});
    std::vector<int> prefix{1};
    for (int i = 2; i <= paths; ++i) {
      std::vector<int> all = prefix;
      all.push_back(i);
      thwart_free = thwart_free && given_t(all) / (given_t(prefix) * given_t({i})) >=
                                       given_q(all) / (given_q(prefix) * given_q({i}));
      prefix = all;
    }
    SmsSpec spec = per_step({"b", "q", "e1", "e2", "e3"}, {"0", "1"}, rows);
    Law law = step_law(spec, 1);
    LawEvidence m(law, "q", "1");
    EvidenceScenario scn{{cl("b", "1")}, {}};
    for (int i = 1; i <= paths; ++i) scn.paths.push_back({cl("e" + std::to_string(i), "1")});
    CheckReport r = derive_monotone(m, scn);
    if ((r.verdict != Verdict::PreconditionFailed) != (lift && thwart_free)) ++disagreements;
    if (!(lift && thwart_free)) continue;
    ++qualifying;
    std::vector<int> upto;
    Rational before = target({});
    for (int i = 1; i <= paths; ++i) {
      upto.push_back(i);
      Rational now = target(upto);
      if (!(now > before)) ++violations;
      before = now;
    }
    if (r.verdict != Verdict::Verified) ++violations;
  }
  return {qualifying == 500 && violations == 0 && disagreements == 0,
          std::to_string(qualifying) + " qualifying scenarios from " + std::to_string(attempts) + " draws, " +
              std::to_string(violations) + " chain violations, " + std::to_string(disagreements) +
              " hypothesis disagreements with the library"};
}

// 10. Byte-identical reports and parse/serialize identity on every fixture.
Outcome determinism() {
  long failures = 0, count = 0;
  for (const auto& e : std::filesystem::directory_iterator(SMSLAB_FIXTURE_DIR)) {
    if (e.path().extension() != ".json") continue;
    ++count;
    Scenario s = parse_scenario(testsupport::read_file(e.path().string()));
    std::string once = serialize(s);
    if (!(parse_scenario(once) == s) || serialize(parse_scenario(once)) != once) ++failures;
    std::string a = to_json(run_scenario(s, 42)).dump(), b = to_json(run_scenario(s, 42)).dump();
    if (a != b) ++failures;
    if (!(run_report_from_json(Json::parse(a)) == run_scenario(s, 42))) ++failures;
  }
  return {failures == 0 && count > 0, std::to_string(count) + " fixtures, " + std::to_string(failures) + " failures"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"limit monotonicity", monotonicity},
      {"dominance and decomposition", dominance},
      {"abduction algebra", abduction_algebra},
      {"constructor soundness at epsilon 0", soundness},
      {"non-vacuity of hypotheses", non_vacuity},
      {"embedding identity", embedding_identity},
      {"projection identity", projection},
      {"Monte Carlo consistency", monte_carlo},
      {"evidence chain derivation", evidence_chain},
      {"determinism and round-trip", determinism},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (only && id != only) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    all = all && out.pass;
    std::cout << "criterion " << id << " " << (out.pass ? "PASS" : "FAIL") << ": " << criteria[i].first << ": "
              << out.detail << std::endl;
  }
  return all ? 0 : 1;
}
