#include <doctest.h>

#include <cmath>
#include <random>

#include "smslab/calibration.hpp"
#include "smslab/errors.hpp"
#include "smslab/generators.hpp"
#include "support.hpp"

using namespace smslab;
using testsupport::cl;

namespace {

Dist d2(const Rational& p0, const Rational& p1) { return Dist{{{"0"}, p0}, {{"1"}, p1}}; }

Setting fixture_setting(const std::string& name) { return setting_of(testsupport::load_fixture(name)); }

bool condition_holds(const CheckReport& r, const std::string& prefix) {
  for (const auto& c : r.details["conditions"])
    if (c["label"].get<std::string>().rfind(prefix, 0) == 0) return c["holds"].get<bool>();
  FAIL("no condition " << prefix);
  return false;
}

// Oracle question qo with answers 0..2 at its limit; reasoner asks qr with answers 0..2 under a context claim.
// Everything random and full support, so every pair below is a prediction pair.
Setting random_setting(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> w(1, 9);
  auto normalized = [&](int n) {
    std::vector<Rational> out(n);
    Rational total = 0;
    for (auto& x : out) total += (x = w(rng));
    for (auto& x : out) x /= total;
    return out;
  };
  Table oracle, reasoner;
  auto po = normalized(6), pr = normalized(6);
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 3; ++a) {
      oracle.push_back(Row{{cl("ctx", std::to_string(c)), cl("qo", std::to_string(a))}, po[c * 3 + a]});
      reasoner.push_back(Row{{cl("ctx", std::to_string(c)), cl("qr", std::to_string(a))}, pr[c * 3 + a]});
    }
  PsiInterp Psi;
  for (int a = 0; a < 3; ++a) {
    auto d = normalized(3);
    Psi.table[{{"qo"}, std::to_string(a)}] = Dist{{{"0"}, d[0]}, {{"1"}, d[1]}, {{"2"}, d[2]}};
  }
  return make_setting(hold_kernel({"ctx", "qo", "qr"}, {"0", "1", "2"}, oracle),
                      per_step({"ctx", "qr"}, {"0", "1", "2"}, reasoner), PsiMap{{{"qr", {"qo"}}}, true}, Psi, 1);
}

}  // namespace

TEST_CASE("identity scenario is a prediction pair") {
  Setting st = fixture_setting("sc_id.json");
  auto r = is_prediction_pair(st, "qa", {});
  CHECK(r.conclusion.holds);
  CHECK(r.details["conditions"].size() == 4);
  auto miss = is_prediction_pair(st, "nope", {});
  CHECK_FALSE(miss.conclusion.holds);
  CHECK_FALSE(condition_holds(miss, "(2)"));
  auto zero = is_prediction_pair(st, "qa", {cl("p", "0")});
  CHECK_FALSE(condition_holds(zero, "(1)"));
}

TEST_CASE("calibration scores of the identity and honest scenarios") {
  Setting id = fixture_setting("sc_id.json");
  Score s = calibration_score(id, "qa", {});
  // 1/2 KL(delta_0, (1/2,1/2)) + 1/2 KL(delta_1, (1/2,1/2)).
  CHECK(s.low == doctest::Approx(std::log(2.0)));
  CHECK(s.determinate());
  CHECK(verdict_at(s, std::log(2.0)) == "calibrated");
  CHECK(verdict_at(s, 0.5) == "not calibrated");
  CHECK(verdict_at(Score{0.1, kInf}, 0.5) == "indeterminate at horizon");

  Setting hon = fixture_setting("sc_hon.json");
  CHECK(calibration_score(hon, "qa", {}).high == 0.0);
  CHECK_THROWS_AS((void)calibration_score(hon, "nope", {}), PreconditionError);
}

TEST_CASE("alphabet containment is required") {
  Setting st = fixture_setting("sc_id.json");
  st.phi2.questions.push_back("extra");
  CHECK_THROWS_AS((void)is_prediction_pair(st, "qa", {}), StructuralError);
}

TEST_CASE("single-SMS reduction") {
  Scenario fa = testsupport::load_fixture("fix_a.json");
  auto self = single_sms_reduction(fa.sms1, fa.sms1, 1, "qa", {});
  CHECK(self.reduction == 0.0);
  CHECK(self.bound_holds);

  SmsSpec tilted = hold_kernel({"qa"}, {"0", "1"}, {Row{{cl("qa", "0")}, rat(3, 4)}, Row{{cl("qa", "1")}, rat(1, 4)}});
  auto tv = single_sms_reduction(fa.sms1, tilted, 1, "qa", {}, DivergenceKind::TV);
  CHECK(tv.reduction == doctest::Approx(0.25));
  CHECK(tv.bound_holds);

  auto kl = single_sms_reduction(fa.sms1, fa.sms1, 1, "qa", {}, DivergenceKind::KL);
  CHECK(kl.delta_score == doctest::Approx(std::log(2.0)));
  CHECK(kl.reduction <= kl.delta_score);
}

TEST_CASE("honesty") {
  Scenario hon = testsupport::load_fixture("sc_hon.json");
  CHECK(run_check(hon, hon.checks[2], 0).verdict == Verdict::Verified);
  Scenario id = testsupport::load_fixture("sc_id.json");
  auto r = run_check(id, id.checks[2], 0);
  CHECK_FALSE(r.conclusion.holds);
  CHECK(r.verdict == Verdict::Refuted);

  // Psi read off the SMS's own conditional is honest, and gives a zero single-SMS score.
  PsiInterp own = honest_interp(*hon.sms2, 1, *hon.psi, "p", {});
  CHECK(is_honest(*hon.sms2, 1, *hon.psi, own, "p", "1", {}).conclusion.holds);
  CHECK(*own.find({"qa"}, "1") == d2(rat(1, 2), rat(1, 2)));

  CHECK_THROWS_AS((void)is_honest(*hon.sms2, 1, *hon.psi, *hon.Psi, "p", "0", {}), ConditioningError);
  CHECK(is_honest(*hon.sms2, 1, *hon.psi, own, "p", "0", {}).verdict == Verdict::PreconditionFailed);
}

TEST_CASE("prediction distribution clauses") {
  Setting id = fixture_setting("sc_id.json");
  Setting single = id;
  single.psi = PsiMap{{{"qa", {"qa"}}}, true};
  single = make_setting(single.phi1, single.phi2, single.psi, single.Psi, 1);
  PredictionDistribution F(single);
  CHECK(F.value({"qa"}, {}) == d2(rat(1, 2), rat(1, 2)));
  CHECK(F.weight({"qa"}, {}) == 1);
  CHECK(F.weight({"qa"}, {cl("p", "0")}) == 0);
  CHECK_THROWS_AS((void)F.value({"qa"}, {cl("p", "0")}), ConditioningError);

  Setting hon = fixture_setting("sc_hon.json");
  hon = make_setting(hon.phi1, hon.phi2, PsiMap{{{"qa", {"qa"}}}, true}, hon.Psi, 1);
  CHECK(PredictionDistribution(hon).value({"qa"}, {}) == d2(rat(1, 2), rat(1, 2)));

  CHECK_THROWS_AS((void)PredictionDistribution(id), StructuralError);
}

TEST_CASE("calibration score bounds the prediction distribution divergence") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Setting st = random_setting(seed);
    PredictionDistribution F(st);
    for (const ClaimSet& s : {ClaimSet{}, ClaimSet{cl("ctx", "0")}, ClaimSet{cl("ctx", "1")}}) {
      Score sc = calibration_score(st, "qr", s);
      Dist oracle = cond_answers(st.oracle, {"qo"}, Event{s, {}, std::nullopt});
      double mix = divergence(F.value({"qo"}, s), oracle, st.kind);
      CHECK(sc.low >= mix - 1e-12);
      // Weighted mixture by hand.
      Dist by_hand;
      for (const auto& [v, p] : reasoner_answers(st, "qr", s))
        for (const auto& [a, w] : *st.Psi.find({"qo"}, v)) by_hand[a] += p * w;
      CHECK(by_hand == F.value({"qo"}, s));
    }
  }
}

TEST_CASE("zero calibration score forces Psi to equal the oracle conditional") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Setting st = random_setting(seed);
    Dist oracle = cond_answers(st.oracle, {"qo"}, Event{{cl("ctx", "1")}, {}, std::nullopt});
    PsiInterp exact;
    for (int a = 0; a < 3; ++a) exact.table[{{"qo"}, std::to_string(a)}] = oracle;
    Setting tuned = make_setting(st.phi1, st.phi2, st.psi, exact, 1);
    CHECK(calibration_score(tuned, "qr", {cl("ctx", "1")}).high == 0.0);
    CHECK(calibration_score(st, "qr", {cl("ctx", "1")}).low > 0.0);
  }
}
