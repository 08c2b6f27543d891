#include "smslab/law.hpp"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "smslab/errors.hpp"

namespace smslab {

namespace {

std::string step_name(int n) { return n == kLimit ? "limit" : "step " + std::to_string(n); }

Law from_vectors(const VectorDist& d, const std::string& where) {
  std::map<ClaimSet, Rational> merged;
  for (const auto& [v, p] : d) merged[unorder(v)] += p;
  Law law;
  law.where = where;
  for (auto& [s, p] : merged) law.atoms.push_back(Law::Atom{s, s, false, p});
  return law;
}

struct Closure {
  ClaimSet reach;
  bool open = false;
};

// Union of claim sets over every state reachable from `start` through the kernel.
Closure closure_of(const SmsSpec& spec, const ClaimVector& start, Budget& budget) {
  Closure c;
  std::set<ClaimVector> seen{start};
  std::vector<ClaimVector> stack{start};
  while (!stack.empty()) {
    ClaimVector v = std::move(stack.back());
    stack.pop_back();
    for (const auto& claim : v) c.reach.insert(claim);
    auto it = spec.kernel.find(v);
    if (it == spec.kernel.end()) {
      c.open = true;
      continue;
    }
    for (const auto& r : it->second) {
      budget.charge();
      if (r.p > 0 && seen.insert(r.vector).second) stack.push_back(r.vector);
    }
  }
  return c;
}

}  // namespace

Law step_law(const SmsSpec& spec, int n) { return from_vectors(step_vectors(spec, n), step_name(n)); }

Law limit_law(const SmsSpec& spec) {
  if (spec.mode != SmsMode::Kernel)
    throw UnsupportedModeError("the limit distribution needs kernel mode");
  int kappa = 0;
  if (spec.kappa) {
    if (!check_backward_consistent(spec, *spec.kappa).conclusion.holds)
      throw PreconditionError("not backward-consistent after the declared kappa " +
                              std::to_string(*spec.kappa));
    kappa = *spec.kappa;
  } else {
    auto k = find_kappa(spec);
    if (!k) throw PreconditionError("not backward-consistent for any kappa below the horizon");
    kappa = *k;
  }
  auto laws = all_step_vectors(spec);
  Budget budget;
  std::map<ClaimVector, Closure> closures;
  auto closure = [&](const ClaimVector& v) -> const Closure& {
    auto it = closures.find(v);
    if (it == closures.end()) it = closures.emplace(v, closure_of(spec, v, budget)).first;
    return it->second;
  };

  int chosen = spec.horizon;
  bool settled = false;
  for (int j = kappa + 1; j <= spec.horizon && !settled; ++j) {
    settled = true;
    for (const auto& [v, p] : laws[j - 1]) {
      const Closure& c = closure(v);
      if (c.open || c.reach != unorder(v)) {
        settled = false;
        break;
      }
    }
    if (settled) chosen = j;
  }

  std::map<std::tuple<ClaimSet, ClaimSet, bool>, Rational> merged;
  for (const auto& [v, p] : laws[chosen - 1]) {
    ClaimSet u = unorder(v);
    if (settled) {
      merged[{u, u, false}] += p;
    } else {
      const Closure& c = closure(v);
      merged[{u, c.reach, c.open}] += p;
    }
  }
  Law law;
  law.where = "limit";
  law.exact = settled;
  law.settled_at = chosen;
  for (auto& [key, p] : merged)
    law.atoms.push_back(Law::Atom{std::get<0>(key), std::get<1>(key), std::get<2>(key), p});
  return law;
}

Law law_at(const SmsSpec& spec, int n) { return n == kLimit ? limit_law(spec) : step_law(spec, n); }

bool Event::holds(const ClaimSet& u) const {
  if (!is_subset(superset, u)) return false;
  for (const auto& q : questions)
    if (!asks(u, q)) return false;
  if (collection) {
    for (const auto& member : *collection)
      if (is_subset(member, u)) return true;
    return false;
  }
  return true;
}

bool Event::possible(const ClaimSet& reach, bool open) const { return open || holds(reach); }

Bracket prob(const Law& law, const Event& e) {
  Bracket b{0, 0};
  for (const auto& a : law.atoms) {
    if (e.holds(a.set)) {
      b.lower += a.mass;
      b.upper += a.mass;
    } else if (!law.exact && e.possible(a.reach, a.open)) {
      b.upper += a.mass;
    }
  }
  return b;
}

Rational prob_value(const Law& law, const Event& e) {
  Bracket b = prob(law, e);
  if (!b.tight())
    throw IndeterminateError("probability at the " + law.where + " is only bracketed in [" +
                             to_string(b.lower) + ", " + to_string(b.upper) + "] at the horizon");
  return b.lower;
}

Rational prob_equal(const Law& law, const ClaimSet& s) {
  Rational total = 0;
  for (const auto& a : law.atoms)
    if (a.set == s) total += a.mass;
  return total;
}

Dist cond_answers(const Law& law, const QuestionVector& qs, const Event& e) {
  if (!law.exact)
    throw IndeterminateError("conditional at the " + law.where + " is not determined at the horizon");
  Event full = e;
  full.questions.insert(full.questions.end(), qs.begin(), qs.end());
  Dist out;
  Rational total = 0;
  for (const auto& a : law.atoms) {
    if (!full.holds(a.set)) continue;
    AnswerVector tuple;
    for (const auto& q : qs) {
      auto as = answers_to(a.set, q);
      if (as.size() != 1)
        throw StructuralError("question " + q + " is answered more than once in " + to_string(a.set) +
                              "; response distributions need non-repeating outputs");
      tuple.push_back(as.front());
    }
    out[tuple] += a.mass;
    total += a.mass;
  }
  if (total == 0) throw ConditioningError(qs, e.superset, law.where);
  for (auto& [k, p] : out) p /= total;
  return out;
}

Rational prob_superset(const SmsSpec& spec, int n, const ClaimSet& s) {
  if (n < 0) throw HorizonError("negative step");
  return prob_value(law_at(spec, n), Event{s, {}, std::nullopt});
}

Rational prob_exact(const SmsSpec& spec, int n, const ClaimSet& s) {
  if (n < 0) throw HorizonError("negative step");
  Law law = law_at(spec, n);
  if (!law.exact) throw IndeterminateError("exact-set probability at the limit is not determined");
  return prob_equal(law, s);
}

Rational semidist_question(const SmsSpec& spec, int n, const QuestionVector& qs, const ClaimSet& s) {
  if (n < 0) throw HorizonError("negative step");
  if (qs.empty()) throw std::invalid_argument("question vector must be non-empty");
  return prob_value(law_at(spec, n), Event{s, qs, std::nullopt});
}

bool is_sure(const Dist& d) {
  int positive = 0;
  for (const auto& [k, p] : d)
    if (p > 0) ++positive;
  return positive == 1;
}

Response response_dist(const SmsSpec& spec, int n, const QuestionVector& qs, const ClaimSet& s) {
  if (n < 0) throw HorizonError("negative step");
  Law law = law_at(spec, n);
  Dist d;
  try {
    d = cond_answers(law, qs, Event{s, {}, std::nullopt});
  } catch (const ConditioningError&) {
    throw ConditioningError(qs, s, step_name(n));
  }
  return Response{d, is_sure(d)};
}

Rational prob_collection(const SmsSpec& spec, int n, const Collection& coll, const ClaimSet& extra,
                         const std::optional<QuestionVector>& qs) {
  if (coll.empty()) throw std::invalid_argument("collection must be non-empty");
  if (n < 0) throw HorizonError("negative step");
  return prob_value(law_at(spec, n), Event{extra, qs.value_or(QuestionVector{}), coll});
}

Dist cond_response_on_collection(const SmsSpec& spec, int n, const QuestionVector& qs,
                                 const Collection& coll) {
  if (coll.empty()) throw std::invalid_argument("collection must be non-empty");
  if (n < 0) throw HorizonError("negative step");
  try {
    return cond_answers(law_at(spec, n), qs, Event{{}, {}, coll});
  } catch (const ConditioningError&) {
    throw ConditioningError("zero-probability conditioning event: questions " + to_string(qs) +
                            " given collection " + to_string(coll) + " at " + step_name(n));
  }
}

LimitValue limit_prob(const SmsSpec& spec, const ClaimSet& s, const Rational& tol) {
  Law law = limit_law(spec);
  Bracket b = prob(law, Event{s, {}, std::nullopt});
  if (b.width() > tol)
    throw HorizonError("limit not resolved within the horizon: bracket [" + to_string(b.lower) + ", " +
                           to_string(b.upper) + "]",
                       b.lower, b.upper);
  return LimitValue{b.lower, b.lower, b.upper, law.settled_at};
}

Dist trajectory_response_dist(const SmsSpec& spec, const std::vector<ClaimVector>& prefix,
                              const Question& q) {
  if (spec.mode != SmsMode::Kernel)
    throw UnsupportedModeError("trajectory distributions need kernel mode");
  if (static_cast<int>(prefix.size()) >= spec.horizon)
    throw HorizonError("prefix reaches the horizon");
  auto row_prob = [](const Table& t, const ClaimVector& v) {
    Rational p = 0;
    for (const auto& r : t)
      if (r.vector == v) p += r.p;
    return p;
  };
  Rational joint = 1;
  const Table* next = &spec.init;
  for (const auto& v : prefix) {
    joint *= row_prob(*next, v);
    if (joint == 0) break;
    auto it = spec.kernel.find(v);
    if (it == spec.kernel.end()) throw StructuralError("no kernel row for " + to_string(v));
    next = &it->second;
  }
  auto fail = [&] {
    return ConditioningError("zero-probability conditioning event: question " + q + " after prefix of length " +
                             std::to_string(prefix.size()));
  };
  if (joint == 0) throw fail();
  Dist out;
  Rational total = 0;
  for (const auto& r : *next) {
    if (r.p <= 0) continue;
    auto as = answers_to(unorder(r.vector), q);
    if (as.empty()) continue;
    if (as.size() > 1) throw StructuralError("question " + q + " repeated in " + to_string(r.vector));
    out[{as.front()}] += r.p;
    total += r.p;
  }
  if (total == 0) throw fail();
  for (auto& [k, p] : out) p /= total;
  return out;
}

McEstimate mc_estimate(const SmsSpec& spec, int n, const ClaimSet& s, std::uint64_t samples,
                       std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  if (n < 1 || n > spec.horizon) throw HorizonError("step outside 1..horizon");
  std::mt19937_64 rng(seed);
  struct Sampler {
    std::vector<ClaimVector> outcomes;
    std::discrete_distribution<std::size_t> pick;
  };
  auto make = [](const Table& t) {
    Sampler sm;
    std::vector<double> w;
    for (const auto& r : t)
      if (r.p > 0) {
        sm.outcomes.push_back(r.vector);
        w.push_back(to_double(r.p));
      }
    sm.pick = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    return sm;
  };
  std::uint64_t hits = 0;
  if (spec.mode == SmsMode::PerStep) {
    Sampler sm = make(spec.steps.at(n - 1));
    for (std::uint64_t i = 0; i < samples; ++i)
      if (is_subset(s, unorder(sm.outcomes[sm.pick(rng)]))) ++hits;
  } else {
    Sampler first = make(spec.init);
    std::map<ClaimVector, Sampler> rows;
    for (std::uint64_t i = 0; i < samples; ++i) {
      ClaimVector v = first.outcomes[first.pick(rng)];
      for (int step = 2; step <= n; ++step) {
        auto it = rows.find(v);
        if (it == rows.end()) {
          auto k = spec.kernel.find(v);
          if (k == spec.kernel.end()) throw StructuralError("no kernel row for " + to_string(v));
          it = rows.emplace(v, make(k->second)).first;
        }
        v = it->second.outcomes[it->second.pick(rng)];
      }
      if (is_subset(s, unorder(v))) ++hits;
    }
  }
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  return McEstimate{p, std::sqrt(p * (1 - p) / static_cast<double>(samples))};
}

std::string to_string(const Dist& d) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, p] : d) {
    if (!first) out += ", ";
    first = false;
    std::string key;
    for (std::size_t i = 0; i < k.size(); ++i) key += (i ? "," : "") + k[i];
    out += key + ": " + to_string(p);
  }
  return out + "}";
}

}  // namespace smslab
