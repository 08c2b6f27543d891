#include <doctest.h>

#include <cmath>

#include "smslab/errors.hpp"
#include "smslab/generators.hpp"
#include "smslab/law.hpp"
#include "support.hpp"

using namespace smslab;
using testsupport::cl;

namespace {

const SmsSpec& fix_b() {
  static const Scenario s = testsupport::load_fixture("fix_b.json");
  return s.sms1;
}

const SmsSpec& fix_a() {
  static const Scenario s = testsupport::load_fixture("fix_a.json");
  return s.sms1;
}

Dist one(const std::string& a, const Rational& p) { return Dist{{{a}, p}}; }

}  // namespace

TEST_CASE("superset probability on the three-vector fixture") {
  CHECK(prob_superset(fix_b(), 1, {cl("qa", "0")}) == rat(2, 3));
  CHECK(prob_superset(fix_b(), 1, {}) == 1);
  CHECK(prob_superset(fix_b(), 1, {cl("qa", "1")}) == 0);
  CHECK_THROWS_AS((void)prob_superset(fix_b(), 2, {}), HorizonError);
}

TEST_CASE("exact-set probability on the three-vector fixture") {
  CHECK(prob_exact(fix_b(), 1, {cl("qa", "0")}) == rat(1, 3));
  CHECK(prob_exact(fix_b(), 1, {cl("qa", "0"), cl("qb", "1")}) == rat(1, 3));
  CHECK(prob_exact(fix_b(), 1, {}) == 0);
}

TEST_CASE("question semi-distribution") {
  CHECK(semidist_question(fix_b(), 1, {"qb"}, {cl("qa", "0")}) == rat(1, 3));
  CHECK(semidist_question(fix_b(), 1, {"qa"}, {}) == rat(2, 3));
  CHECK(semidist_question(fix_b(), 1, {"qa", "qb"}, {}) == rat(1, 3));
}

TEST_CASE("response distribution") {
  auto ra = response_dist(fix_b(), 1, {"qa"}, {});
  CHECK(ra.dist == one("0", 1));
  CHECK(ra.sure);
  auto rb = response_dist(fix_b(), 1, {"qb"}, {});
  CHECK(rb.dist == Dist{{{"0"}, rat(1, 2)}, {{"1"}, rat(1, 2)}});
  CHECK_FALSE(rb.sure);
  CHECK_THROWS_AS((void)response_dist(fix_b(), 1, {"qb"}, {cl("qa", "1")}), ConditioningError);
  try {
    (void)response_dist(fix_b(), 1, {"qb"}, {cl("qa", "1")});
  } catch (const ConditioningError& e) {
    CHECK(e.questions == QuestionVector{"qb"});
    CHECK(e.conditioning == ClaimSet{cl("qa", "1")});
    CHECK(e.where == "step 1");
  }
  // Two-question tuples are matched by index.
  auto rab = response_dist(fix_b(), 1, {"qb", "qa"}, {});
  CHECK(rab.dist == Dist{{{"1", "0"}, 1}});
}

TEST_CASE("collection events") {
  Collection both{{cl("qa", "0")}, {cl("qb", "0")}};
  CHECK(prob_collection(fix_b(), 1, both, {}) == 1);
  CHECK(prob_collection(fix_b(), 1, {{cl("qa", "1")}}, {}) == 0);
  CHECK(prob_collection(fix_b(), 1, {{cl("qa", "0")}}, {cl("qb", "1")}) == rat(1, 3));
  CHECK(cond_response_on_collection(fix_b(), 1, {"qb"}, {{cl("qa", "0")}}) == one("1", 1));
  CHECK(cond_response_on_collection(fix_b(), 1, {"qa"}, {{}}) == one("0", 1));
  CHECK_THROWS_AS((void)cond_response_on_collection(fix_b(), 1, {"qb"}, {{cl("qa", "1")}}), ConditioningError);
}

TEST_CASE("limit of the coin with hold") {
  auto lv = limit_prob(fix_a(), {cl("qa", "0")}, rat(1, 1000000));
  CHECK(lv.value == rat(1, 2));
  CHECK(lv.lower == lv.upper);
  CHECK(limit_prob(fix_a(), {}, rat(1, 1000000)).value == 1);

  // Adds (qb,1) with probability 1 at step 2 and then holds.
  SmsSpec absorb;
  absorb.questions = {"qa", "qb"};
  absorb.answers = {"0", "1"};
  absorb.horizon = 4;
  absorb.mode = SmsMode::Kernel;
  ClaimVector a{cl("qa", "0")}, ab{cl("qa", "0"), cl("qb", "1")};
  absorb.init = {Row{a, 1}};
  absorb.kernel[a] = {Row{ab, 1}};
  absorb.kernel[ab] = {Row{ab, 1}};
  auto lb = limit_prob(absorb, {cl("qb", "1")}, rat(1, 1000000));
  CHECK(lb.value == 1);
  CHECK(lb.lower == 1);
  CHECK(lb.upper == 1);

  CHECK_THROWS((void)limit_prob(fix_b(), {}, rat(1, 1000000)));
}

TEST_CASE("limit bracket of a slowly filling kernel") {
  // Each step adds (qb,1) with probability 1/2 until the horizon; the chain never stabilizes.
  SmsSpec slow;
  slow.questions = {"qa", "qb"};
  slow.answers = {"0", "1"};
  slow.horizon = 5;
  slow.mode = SmsMode::Kernel;
  ClaimVector a{cl("qa", "0")}, ab{cl("qa", "0"), cl("qb", "1")};
  slow.init = {Row{a, 1}};
  slow.kernel[a] = {Row{a, rat(1, 2)}, Row{ab, rat(1, 2)}};
  slow.kernel[ab] = {Row{ab, 1}};
  // With absorbing rows the reachable sets are known: qb can still appear from {qa}.
  Law lim = limit_law(slow);
  Bracket b = prob(lim, Event{{cl("qb", "1")}, {}, std::nullopt});
  CHECK(b.lower == rat(15, 16));
  CHECK(b.upper == 1);
  CHECK_THROWS_AS((void)limit_prob(slow, {cl("qb", "1")}, rat(1, 1000000)), HorizonError);
  auto loose = limit_prob(slow, {cl("qb", "1")}, rat(1, 8));
  CHECK(loose.lower == rat(15, 16));
  CHECK(loose.upper == 1);
}

TEST_CASE("trajectory response distribution") {
  CHECK(trajectory_response_dist(fix_a(), {{cl("qa", "0")}}, "qa") == one("0", 1));
  CHECK(trajectory_response_dist(fix_a(), {{cl("qa", "1")}}, "qa") == one("1", 1));
  CHECK_THROWS_AS((void)trajectory_response_dist(fix_a(), {{cl("qa", "0")}, {cl("qa", "1")}}, "qa"),
                  ConditioningError);
  CHECK_THROWS_AS((void)trajectory_response_dist(fix_b(), {}, "qa"), UnsupportedModeError);
}

TEST_CASE("Monte Carlo estimate") {
  auto e = mc_estimate(fix_b(), 1, {cl("qa", "0")}, 100000, 7);
  CHECK(std::abs(e.estimate - 2.0 / 3.0) <= 4 * e.std_error);
  CHECK(mc_estimate(fix_b(), 1, {}, 100, 3).estimate == 1.0);
  CHECK(mc_estimate(fix_b(), 1, {cl("qa", "1")}, 100, 3).estimate == 0.0);
  CHECK(mc_estimate(fix_b(), 1, {cl("qa", "0")}, 1000, 5).estimate ==
        mc_estimate(fix_b(), 1, {cl("qa", "0")}, 1000, 5).estimate);
  CHECK_THROWS((void)mc_estimate(fix_b(), 1, {}, 0, 1));
}

TEST_CASE("engine matches trajectory enumeration on random kernels") {
  Profile p;
  p.kernel = true;
  p.horizon = 4;
  p.questions = 3;
  p.answers = 2;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SmsSpec spec = random_backward_consistent(p, seed);
    for (int n = 1; n <= spec.horizon; ++n) {
      auto law = testsupport::oracle_step(spec, n);
      for (const auto& s : testsupport::support_closure(law)) {
        ClaimSet cs(s.begin(), s.end());
        CHECK(prob_superset(spec, n, cs) == testsupport::oracle_superset(law, s));
        CHECK(prob_exact(spec, n, cs) == testsupport::oracle_exact(law, s));
      }
    }
  }
}

TEST_CASE("dominance, decomposition and superset monotonicity") {
  Profile p;
  p.kernel = true;
  p.horizon = 3;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SmsSpec spec = random_backward_consistent(p, seed);
    for (int n = 1; n <= spec.horizon; ++n) {
      auto law = testsupport::oracle_step(spec, n);
      auto closure = testsupport::support_closure(law);
      for (const auto& s : closure) {
        ClaimSet cs(s.begin(), s.end());
        Rational sup = prob_superset(spec, n, cs);
        CHECK(prob_exact(spec, n, cs) <= sup);
        Rational sum = 0;
        for (const auto& t : closure)
          if (testsupport::contains_all(t, s)) sum += prob_exact(spec, n, ClaimSet(t.begin(), t.end()));
        CHECK(sum == sup);
        for (const auto& t : closure)
          if (testsupport::contains_all(t, s)) CHECK(prob_superset(spec, n, ClaimSet(t.begin(), t.end())) <= sup);
      }
    }
  }
}

TEST_CASE("response distributions are normalized") {
  Profile p;
  p.questions = 3;
  p.answers = 3;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SmsSpec spec = random_sms(p, seed);
    auto law = testsupport::oracle_step(spec, 1);
    for (const auto& q : spec.questions) {
      for (const auto& s : testsupport::support_closure(law)) {
        ClaimSet cs(s.begin(), s.end());
        if (semidist_question(spec, 1, {q}, cs) == 0) {
          CHECK_THROWS_AS((void)response_dist(spec, 1, {q}, cs), ConditioningError);
          continue;
        }
        if (asks(cs, q)) continue;
        auto r = response_dist(spec, 1, {q}, cs);
        Rational total = 0;
        for (const auto& [a, w] : r.dist) {
          total += w;
          CHECK(w == testsupport::oracle_cond(law, q, a[0], s));
        }
        CHECK(total == 1);
      }
    }
  }
}
