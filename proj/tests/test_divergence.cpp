#include <doctest.h>

#include <cmath>
#include <random>

#include "smslab/divergence.hpp"
#include "smslab/errors.hpp"

using namespace smslab;

namespace {

Dist d2(const Rational& p0, const Rational& p1) { return Dist{{{"0"}, p0}, {{"1"}, p1}}; }

double kl_by_hand(const Dist& p, const Dist& r) {
  double total = 0;
  for (const auto& [k, w] : p)
    if (w > 0) total += w.get_d() * std::log(w.get_d() / r.at(k).get_d());
  return total;
}

Dist random_dist(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> pick(1, 20);
  std::vector<int> w(n);
  int total = 0;
  for (auto& x : w) total += (x = pick(rng));
  Dist d;
  for (int i = 0; i < n; ++i) d[{std::to_string(i)}] = rat(w[i], total);
  return d;
}

}  // namespace

TEST_CASE("divergence of a distribution with itself is zero") {
  for (auto kind : {DivergenceKind::KL, DivergenceKind::TV, DivergenceKind::JS}) {
    CHECK(divergence(d2(rat(1, 3), rat(2, 3)), d2(rat(1, 3), rat(2, 3)), kind) == 0.0);
    CHECK(divergence(d2(1, 0), d2(1, 0), kind) == 0.0);
  }
}

TEST_CASE("divergence values by definition") {
  CHECK(divergence(d2(1, 0), d2(rat(1, 2), rat(1, 2)), DivergenceKind::TV) == doctest::Approx(0.5));
  CHECK(divergence(d2(1, 0), d2(rat(1, 2), rat(1, 2)), DivergenceKind::KL) == doctest::Approx(std::log(2.0)));
  CHECK(divergence(d2(rat(1, 2), rat(1, 2)), d2(rat(3, 4), rat(1, 4)), DivergenceKind::TV) == doctest::Approx(0.25));
  // Jensen-Shannon of two point masses on different outcomes is ln 2.
  CHECK(divergence(d2(1, 0), d2(0, 1), DivergenceKind::JS) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("divergence errors") {
  CHECK_THROWS_AS((void)divergence(d2(rat(1, 2), rat(1, 2)), d2(1, 0), DivergenceKind::KL), SupportError);
  Dist three{{{"0"}, rat(1, 3)}, {{"1"}, rat(1, 3)}, {{"2"}, rat(1, 3)}};
  Dist pair{{{"0", "0"}, 1}};
  CHECK_THROWS_AS((void)divergence(pair, three, DivergenceKind::TV), DomainError);
  CHECK_THROWS_AS((void)divergence(d2(rat(1, 2), rat(1, 3)), three, DivergenceKind::TV), DomainError);
  CHECK(divergence_from_string("total-variation") == DivergenceKind::TV);
  CHECK(divergence_from_string("jensen-shannon") == DivergenceKind::JS);
  CHECK_THROWS((void)divergence_from_string("hellinger"));
}

TEST_CASE("non-negativity, identity and kl agreement with a direct formula") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    Dist p = random_dist(rng, 3), r = random_dist(rng, 3);
    for (auto kind : {DivergenceKind::KL, DivergenceKind::TV, DivergenceKind::JS}) {
      double d = divergence(p, r, kind);
      CHECK(d >= 0);
      if (p != r) CHECK(d > 0);
    }
    CHECK(divergence(p, r, DivergenceKind::KL) == doctest::Approx(kl_by_hand(p, r)).epsilon(1e-12));
    CHECK(divergence(p, r, DivergenceKind::TV) == doctest::Approx(divergence(r, p, DivergenceKind::TV)));
  }
}

TEST_CASE("kl is asymmetric on a fixture pair") {
  Dist p = d2(rat(1, 10), rat(9, 10)), r = d2(rat(1, 2), rat(1, 2));
  CHECK(divergence(p, r, DivergenceKind::KL) != doctest::Approx(divergence(r, p, DivergenceKind::KL)));
}

TEST_CASE("convexity in the first argument") {
  CHECK(check_convexity(DivergenceKind::KL, 1000, 1).verdict == Verdict::Verified);
  CHECK(check_convexity(DivergenceKind::TV, 1000, 1).verdict == Verdict::Verified);
  CHECK(check_convexity(DivergenceKind::JS, 1000, 1).verdict == Verdict::Verified);
  // lambda = 0 endpoint: the mixture is p2 and both sides agree.
  Dist p1 = d2(rat(1, 4), rat(3, 4)), p2 = d2(rat(2, 3), rat(1, 3)), r = d2(rat(1, 2), rat(1, 2));
  CHECK(divergence(p2, r, DivergenceKind::KL) == doctest::Approx(0 * divergence(p1, r, DivergenceKind::KL) +
                                                                  1 * divergence(p2, r, DivergenceKind::KL)));
}

TEST_CASE("full support gate") {
  CHECK(full_support(d2(rat(1, 2), rat(1, 2)), d2(rat(1, 3), rat(2, 3))));
  CHECK_FALSE(full_support(d2(1, 0), d2(rat(1, 3), rat(2, 3))));
}
