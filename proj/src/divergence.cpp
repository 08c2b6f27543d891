#include "smslab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "smslab/errors.hpp"

namespace smslab {

std::string to_string(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::KL:
      return "kl";
    case DivergenceKind::TV:
      return "tv";
    case DivergenceKind::JS:
      return "js";
  }
  return "kl";
}

DivergenceKind divergence_from_string(const std::string& s) {
  if (s == "kl") return DivergenceKind::KL;
  if (s == "tv" || s == "total-variation") return DivergenceKind::TV;
  if (s == "js" || s == "jensen-shannon") return DivergenceKind::JS;
  throw std::invalid_argument("unknown divergence kind: " + s);
}

namespace {

Rational at(const Dist& d, const AnswerVector& k) {
  auto it = d.find(k);
  return it == d.end() ? Rational(0) : it->second;
}

void check_domain(const Dist& p, const Dist& r) {
  std::set<std::size_t> arity;
  for (const auto* d : {&p, &r}) {
    Rational total = 0;
    for (const auto& [k, v] : *d) {
      if (v < 0) throw DomainError("negative probability in " + to_string(*d));
      arity.insert(k.size());
      total += v;
    }
    if (total != 1) throw DomainError("distribution not normalized: " + to_string(*d));
  }
  if (arity.size() > 1) throw DomainError("distributions range over answer tuples of different lengths");
}

double kl_terms(const Dist& p, const Dist& r) {
  double sum = 0;
  for (const auto& [k, pv] : p) {
    if (pv == 0) continue;
    Rational rv = at(r, k);
    if (rv == 0) throw SupportError("kl: outcome outside the support of the second argument");
    Rational ratio = pv / rv;
    sum += to_double(pv) * std::log(to_double(ratio));
  }
  return std::max(0.0, sum);
}

}  // namespace

double divergence(const Dist& p, const Dist& r, DivergenceKind kind) {
  check_domain(p, r);
  std::set<AnswerVector> keys;
  for (const auto& [k, v] : p) keys.insert(k);
  for (const auto& [k, v] : r) keys.insert(k);
  bool equal = true;
  for (const auto& k : keys)
    if (at(p, k) != at(r, k)) equal = false;
  if (equal) return 0.0;

  switch (kind) {
    case DivergenceKind::KL:
      return kl_terms(p, r);
    case DivergenceKind::TV: {
      Rational half = 0;
      for (const auto& k : keys) half += abs(at(p, k) - at(r, k));
      return to_double(half / 2);
    }
    case DivergenceKind::JS: {
      Dist m;
      for (const auto& k : keys) m[k] = (at(p, k) + at(r, k)) / 2;
      return 0.5 * kl_terms(p, m) + 0.5 * kl_terms(r, m);
    }
  }
  return 0.0;
}

bool full_support(const Dist& p, const Dist& r) {
  for (const auto* d : {&p, &r})
    for (const auto& [k, v] : *d)
      if (v > 0 && (at(p, k) <= 0 || at(r, k) <= 0)) return false;
  return true;
}

CheckReport check_convexity(DivergenceKind kind, int trials, std::uint64_t seed) {
  CheckReport rep("convexity-" + to_string(kind));
  rep.require("trials positive", trials > 0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_pick(2, 5);
  std::uniform_int_distribution<long> weight(1, 64);
  auto random_dist = [&](int k) {
    std::vector<long> w(k);
    long total = 0;
    for (auto& x : w) total += (x = weight(rng));
    Dist d;
    for (int i = 0; i < k; ++i) d[{std::to_string(i)}] = rat(w[i], total);
    return d;
  };
  double worst = -1e300;
  Json witness;
  for (int t = 0; t < trials; ++t) {
    int k = size_pick(rng);
    Dist p1 = random_dist(k), p2 = random_dist(k), r = random_dist(k);
    Rational lambda = rat(std::uniform_int_distribution<long>(0, 64)(rng), 64);
    Dist mix;
    for (const auto& [key, v] : p1) mix[key] = lambda * v + (1 - lambda) * at(p2, key);
    double lhs = divergence(mix, r, kind);
    double rhs = to_double(lambda) * divergence(p1, r, kind) +
                 to_double(1 - lambda) * divergence(p2, r, kind);
    double gap = lhs - rhs;
    if (gap > worst) {
      worst = gap;
      witness = Json{{"trial", t}, {"lambda", to_string(lambda)}, {"lhs", lhs}, {"rhs", rhs}};
    }
  }
  rep.conclusion.holds = trials <= 0 || worst <= 1e-12;
  rep.conclusion.lhs = witness;
  rep.conclusion.margin = trials > 0 ? Json(-worst) : Json(nullptr);
  rep.details["trials"] = trials;
  rep.details["seed"] = seed;
  rep.finish();
  return rep;
}

}  // namespace smslab
