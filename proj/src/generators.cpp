#include "smslab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "smslab/embedding.hpp"
#include "smslab/errors.hpp"

namespace smslab {

namespace {

using Rng = std::mt19937_64;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string num(int i) { return std::to_string(i); }

std::vector<Answer> answer_range(int n) {
  std::vector<Answer> out;
  for (int i = 0; i < n; ++i) out.push_back(num(i));
  return out;
}

// Random positive weights normalized to sum 1.
std::vector<Rational> random_masses(Rng& rng, std::size_t n, bool sparse = false) {
  std::vector<Rational> w(n);
  Rational total = 0;
  for (auto& x : w) {
    x = sparse ? uniform(rng, 0, 64) : uniform(rng, 2, 64);
    total += x;
  }
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (auto& x : w) x /= total;
  return w;
}

// n strictly increasing probabilities in (0, 1) with denominator 16.
std::vector<Rational> increasing_probs(Rng& rng, int n) {
  std::vector<int> pool;
  for (int i = 1; i <= 15; ++i) pool.push_back(i);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<int> pick(pool.begin(), pool.begin() + n);
  std::sort(pick.begin(), pick.end());
  std::vector<Rational> out;
  for (int k : pick) out.push_back(rat(k, 16));
  return out;
}

Dist bernoulli(const Rational& p1) { return Dist{{{"0"}, 1 - p1}, {{"1"}, p1}}; }

Rational bit_mass(const std::vector<Rational>& p, unsigned bits) {
  Rational m = 1;
  for (std::size_t i = 0; i < p.size(); ++i) m *= (bits >> i & 1) ? p[i] : 1 - p[i];
  return m;
}

int popcount(unsigned x) { return __builtin_popcount(x); }

std::vector<ClaimSet> support_sets(const Table& t) {
  std::vector<ClaimSet> out;
  for (const auto& r : t)
    if (r.p > 0) out.push_back(unorder(r.vector));
  return out;
}

SmsSpec image_of(const SmsSpec& universe, const EmbeddingMap& E) {
  return image_process(limit_law(universe), E, 1);
}

Json set_arg(const ClaimSet& s) { return claim_set_json(s); }

Json paths_arg(const std::vector<ClaimSet>& paths) {
  Json out = Json::array();
  for (const auto& p : paths) out.push_back(claim_set_json(p));
  return out;
}

// Evidence-chain instance over target question w with N binary evidence bits.
struct EvidenceWorld {
  int n = 1;
  std::vector<Rational> bit_p;      // P(e_i = 1)
  std::vector<Rational> target_p;   // P(w = 1 | count = k), k = 0..n
};

EvidenceWorld random_evidence_world(Rng& rng, int n) {
  EvidenceWorld w;
  w.n = n;
  for (int i = 0; i < n; ++i) w.bit_p.push_back(rat(uniform(rng, 2, 6), 8));
  w.target_p = increasing_probs(rng, n + 1);
  return w;
}

std::string bit_q(int i) { return "e" + num(i + 1); }

// Oracle for the mathematical evidence proposition: b, e_i, w; the label question q is declared, never asked.
Scenario evidence_math_scenario(const EvidenceWorld& w, const std::vector<Rational>& oracle_target) {
  std::vector<Question> q1{"b"}, q2{"b"};
  for (int i = 0; i < w.n; ++i) {
    q1.push_back(bit_q(i));
    q2.push_back(bit_q(i));
  }
  q1.push_back("q");
  q1.push_back("w");
  q2.push_back("q");
  auto answers = answer_range(std::max(2, w.n + 1));
  Table oracle, reasoner;
  for (unsigned bits = 0; bits < (1u << w.n); ++bits) {
    ClaimVector base{Claim{"b", "1"}};
    for (int i = 0; i < w.n; ++i) base.push_back(Claim{bit_q(i), num(bits >> i & 1)});
    Rational m = bit_mass(w.bit_p, bits);
    int k = popcount(bits);
    for (int y = 0; y < 2; ++y) {
      ClaimVector v = base;
      v.push_back(Claim{"w", num(y)});
      oracle.push_back(Row{v, m * (y ? oracle_target[k] : 1 - oracle_target[k])});
    }
    ClaimVector r = base;
    r.push_back(Claim{"q", num(k)});
    reasoner.push_back(Row{r, m});
  }
  Scenario s;
  s.sms1 = hold_kernel(q1, answers, oracle);
  s.sms2 = per_step(q2, answers, reasoner);
  s.psi = PsiMap{{{"q", {"w"}}}, true};
  PsiInterp Psi;
  for (int k = 0; k <= w.n; ++k) Psi.table[{{"w"}, num(k)}] = bernoulli(w.target_p[k]);
  s.Psi = Psi;
  std::vector<ClaimSet> paths;
  for (int i = 0; i < w.n; ++i) paths.push_back(ClaimSet{Claim{bit_q(i), "1"}});
  s.checks.push_back(CheckRequest{
      "p73", Json{{"q", "q"}, {"target", "1"}, {"beta", set_arg({Claim{"b", "1"}})}, {"paths", paths_arg(paths)}}});
  return s;
}

// Largest calibration score over the subsets the p73 check quantifies over, rounded up to 1e-9.
double p73_epsilon(const Scenario& s) {
  Setting st = setting_of(s);
  const Json& args = s.checks.front().args;
  ClaimSet all = claim_set_from_json(args["beta"]);
  for (const auto& p : args["paths"]) {
    ClaimSet b = claim_set_from_json(p);
    all.insert(b.begin(), b.end());
  }
  double worst = 0;
  for (const auto& sub : all_subsets(all)) worst = std::max(worst, calibration_score(st, "q", sub).high);
  return std::ceil(worst * 1e9) / 1e9;
}

Constructed make_p73(Rng& rng) {
  EvidenceWorld w = random_evidence_world(rng, uniform(rng, 1, 3));
  Constructed c{evidence_math_scenario(w, w.target_p), std::nullopt};
  c.scenario.epsilon = p73_epsilon(c.scenario);
  return c;
}

Constructed make_p74(Rng& rng) {
  EvidenceWorld w = random_evidence_world(rng, uniform(rng, 1, 3));
  std::vector<Question> q1{"b"};
  for (int i = 0; i < w.n; ++i) q1.push_back(bit_q(i));
  q1.push_back("s");
  q1.push_back("w");
  auto answers = answer_range(std::max(2, w.n + 1));
  Table universe;
  std::map<Claim, Claim> claim_map{{Claim{"b", "1"}, Claim{"b", "1"}}};
  for (unsigned bits = 0; bits < (1u << w.n); ++bits) {
    int k = popcount(bits);
    for (int y = 0; y < 2; ++y) {
      ClaimVector v{Claim{"b", "1"}};
      for (int i = 0; i < w.n; ++i) v.push_back(Claim{bit_q(i), num(bits >> i & 1)});
      v.push_back(Claim{"s", num(k)});
      v.push_back(Claim{"w", num(y)});
      universe.push_back(Row{v, bit_mass(w.bit_p, bits) * (y ? w.target_p[k] : 1 - w.target_p[k])});
    }
  }
  for (int i = 0; i < w.n; ++i)
    for (const char* a : {"0", "1"}) claim_map[Claim{bit_q(i), a}] = Claim{bit_q(i), a};
  for (int k = 0; k <= w.n; ++k) claim_map[Claim{"s", num(k)}] = Claim{"q", num(k)};
  Scenario s;
  s.sms1 = hold_kernel(q1, answers, universe);
  s.E = EmbeddingMap::claimwise(support_sets(universe), claim_map);
  s.sms2 = image_of(s.sms1, *s.E);
  s.psi = PsiMap{{{"q", {"w"}}}, true};
  PsiInterp Psi;
  for (int k = 0; k <= w.n; ++k) Psi.table[{{"w"}, num(k)}] = bernoulli(w.target_p[k]);
  s.Psi = Psi;
  std::vector<ClaimSet> paths;
  for (int i = 0; i < w.n; ++i) paths.push_back(ClaimSet{Claim{bit_q(i), "1"}});
  s.checks.push_back(CheckRequest{
      "p74", Json{{"q", "q"}, {"target", "1"}, {"beta", set_arg({Claim{"b", "1"}})}, {"paths", paths_arg(paths)}}});
  return {s, std::nullopt};
}

// Universe b, evidence bits x_i, label s = f(bits), target w | bits. E keeps b, keeps x_i when `keep[i]`,
// maps s to the scientist question q and drops w. Psi(v) is read off P1(w | s = v).
Scenario flipped_scenario(const EvidenceWorld& w, const std::vector<int>& label, const std::vector<bool>& keep) {
  std::vector<Question> q1{"b"};
  for (int i = 0; i < w.n; ++i) q1.push_back(bit_q(i));
  q1.push_back("s");
  q1.push_back("w");
  int labels = *std::max_element(label.begin(), label.end()) + 1;
  auto answers = answer_range(std::max(2, labels));
  Table universe;
  std::map<int, Rational> label_mass, label_hit;
  for (unsigned bits = 0; bits < (1u << w.n); ++bits) {
    int k = popcount(bits);
    Rational m = bit_mass(w.bit_p, bits);
    label_mass[label[bits]] += m;
    label_hit[label[bits]] += m * w.target_p[k];
    for (int y = 0; y < 2; ++y) {
      ClaimVector v{Claim{"b", "1"}};
      for (int i = 0; i < w.n; ++i) v.push_back(Claim{bit_q(i), num(bits >> i & 1)});
      v.push_back(Claim{"s", num(label[bits])});
      v.push_back(Claim{"w", num(y)});
      universe.push_back(Row{v, m * (y ? w.target_p[k] : 1 - w.target_p[k])});
    }
  }
  std::map<Claim, Claim> claim_map{{Claim{"b", "1"}, Claim{"b", "1"}}};
  for (int i = 0; i < w.n; ++i)
    if (keep[i])
      for (const char* a : {"0", "1"}) claim_map[Claim{bit_q(i), a}] = Claim{bit_q(i), a};
  for (const auto& [l, m] : label_mass) claim_map[Claim{"s", num(l)}] = Claim{"q", num(l)};
  Scenario s;
  s.sms1 = hold_kernel(q1, answers, universe);
  s.E = EmbeddingMap::claimwise(support_sets(universe), claim_map);
  s.sms2 = image_of(s.sms1, *s.E);
  s.psi = PsiMap{{{"q", {"w"}}}, true};
  PsiInterp Psi;
  for (const auto& [l, m] : label_mass) Psi.table[{{"w"}, num(l)}] = bernoulli(label_hit[l] / m);
  s.Psi = Psi;
  std::vector<ClaimSet> paths;
  for (int i = 0; i < w.n; ++i) paths.push_back(ClaimSet{Claim{bit_q(i), "1"}});
  s.checks.push_back(CheckRequest{
      "p75", Json{{"q", "q"}, {"target", "1"}, {"beta", set_arg({Claim{"b", "1"}})}, {"paths", paths_arg(paths)}}});
  return s;
}

Constructed make_p75(Rng& rng) {
  EvidenceWorld w = random_evidence_world(rng, 1);
  return {flipped_scenario(w, {0, 1}, {true}), std::nullopt};
}

Constructed make_projection(Rng& rng) {
  int labels = uniform(rng, 2, 3), worlds = uniform(rng, 2, 3);
  auto label_p = random_masses(rng, labels);
  auto context_p = random_masses(rng, 2);
  std::vector<std::vector<Rational>> world_p;
  for (int l = 0; l < labels; ++l) world_p.push_back(random_masses(rng, worlds));
  Table universe;
  std::map<Claim, Claim> claim_map;
  for (int l = 0; l < labels; ++l)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < worlds; ++x)
        universe.push_back(Row{{Claim{"s", num(l)}, Claim{"c", num(y)}, Claim{"w", num(x)}},
                               label_p[l] * context_p[y] * world_p[l][x]});
  for (int l = 0; l < labels; ++l) claim_map[Claim{"s", num(l)}] = Claim{"q", num(l)};
  for (int y = 0; y < 2; ++y) claim_map[Claim{"c", num(y)}] = Claim{"c", num(y)};
  for (int x = 0; x < worlds; ++x) claim_map[Claim{"w", num(x)}] = Claim{"o", num(x)};
  Scenario s;
  s.sms1 = hold_kernel({"c", "s", "w"}, answer_range(std::max({labels, worlds, 2})), universe);
  s.E = EmbeddingMap::claimwise(support_sets(universe), claim_map);
  s.sms2 = image_of(s.sms1, *s.E);
  s.psi = PsiMap{{{"q", {"w"}}}, true};
  PsiInterp Psi;
  for (int l = 0; l < labels; ++l) {
    Dist d;
    for (int x = 0; x < worlds; ++x) d[{num(x)}] = world_p[l][x];
    Psi.table[{{"w"}, num(l)}] = d;
  }
  s.Psi = Psi;
  ClaimSet context;
  if (uniform(rng, 0, 1)) context.insert(Claim{"c", num(uniform(rng, 0, 1))});
  s.checks.push_back(CheckRequest{"projection", Json{{"q", "q"}, {"C", set_arg(context)}}});
  return {s, std::nullopt};
}

// 2x2 joint over (x, y) with P(x=1, y=1) = alpha * P(x=1) * P(y=1).
struct Joint {
  Rational alpha, px, py;
  [[nodiscard]] Rational cell(int i, int j) const {
    Rational both = alpha * px * py;
    if (i && j) return both;
    if (i) return px - both;
    if (j) return py - both;
    return 1 - px - py + both;
  }
};

Joint random_joint(Rng& rng, const Rational& alpha) {
  return Joint{alpha, rat(uniform(rng, 2, 7), 16), rat(uniform(rng, 2, 7), 16)};
}

PsiInterp abduction_interp(const Joint& J) {
  PsiInterp Psi;
  Psi.table[{{"x"}, "1"}] = bernoulli(J.px);
  Psi.table[{{"y"}, "1"}] = bernoulli(J.py);
  Dist both;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) both[{num(i), num(j)}] = J.cell(i, j);
  Psi.table[{{"x", "y"}, "1"}] = both;
  return Psi;
}

const PsiMap kAbductionPsi{{{"a", {"x"}}, {"b", {"y"}}, {"c", {"x", "y"}}}, true};

Json abduction_args() { return Json{{"observed", Json::array({"x", "1"})}, {"explanation", Json::array({"y", "1"})}}; }

Scenario abduction_math_scenario(const Joint& J, bool with_context) {
  Table oracle;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      oracle.push_back(Row{{Claim{"x", num(i)}, Claim{"y", num(j)}, Claim{"z", "1"}}, J.cell(i, j)});
  Scenario s;
  s.sms1 = hold_kernel({"a", "b", "c", "x", "y", "z"}, {"0", "1"}, oracle);
  s.sms2 = per_step({"a", "b", "c", "z"}, {"1"},
                    Table{Row{{Claim{"a", "1"}, Claim{"b", "1"}, Claim{"c", "1"}, Claim{"z", "1"}}, 1}});
  s.psi = kAbductionPsi;
  s.Psi = abduction_interp(J);
  Json args = abduction_args();
  args["context"] = with_context ? set_arg({Claim{"z", "1"}}) : Json::array();
  s.checks.push_back(CheckRequest{"p81", args});
  return s;
}

Scenario abduction_sci_scenario(const Joint& J, bool with_context, const std::string& prop) {
  Table universe;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      universe.push_back(Row{{Claim{"sa", "1"}, Claim{"sb", "1"}, Claim{"sc", "1"}, Claim{"x", num(i)},
                              Claim{"y", num(j)}, Claim{"z", "1"}},
                             J.cell(i, j)});
  std::map<Claim, Claim> claim_map{{Claim{"sa", "1"}, Claim{"a", "1"}},
                                   {Claim{"sb", "1"}, Claim{"b", "1"}},
                                   {Claim{"sc", "1"}, Claim{"c", "1"}},
                                   {Claim{"x", "0"}, Claim{"x", "0"}},
                                   {Claim{"x", "1"}, Claim{"x", "1"}},
                                   {Claim{"z", "1"}, Claim{"z", "1"}}};
  Scenario s;
  s.sms1 = hold_kernel({"sa", "sb", "sc", "x", "y", "z"}, {"0", "1"}, universe);
  s.E = EmbeddingMap::claimwise(support_sets(universe), claim_map);
  s.sms2 = image_of(s.sms1, *s.E);
  s.psi = kAbductionPsi;
  s.Psi = abduction_interp(J);
  Json args = abduction_args();
  args[prop == "p82" ? "context" : "universe_context"] = with_context ? set_arg({Claim{"z", "1"}}) : Json::array();
  s.checks.push_back(CheckRequest{prop, args});
  return s;
}

Rational random_alpha(Rng& rng) { return rat(uniform(rng, 5, 8), 4); }

Constructed make_kind(const std::string& kind, Rng& rng) {
  if (kind == "p73") return make_p73(rng);
  if (kind == "p74") return make_p74(rng);
  if (kind == "p75") return make_p75(rng);
  if (kind == "projection") return make_projection(rng);
  if (kind == "p81" || kind == "p82" || kind == "p83") {
    Rational alpha = random_alpha(rng);
    Joint J = random_joint(rng, alpha);
    bool ctx = uniform(rng, 0, 1);
    Scenario s = kind == "p81" ? abduction_math_scenario(J, ctx) : abduction_sci_scenario(J, ctx, kind);
    return {s, alpha};
  }
  throw DomainError("unknown constructor kind \"" + kind + "\"");
}

ClaimVector random_vector(Rng& rng, int nq, int nv) {
  std::vector<int> qs(nq);
  for (int i = 0; i < nq; ++i) qs[i] = i;
  std::shuffle(qs.begin(), qs.end(), rng);
  int len = uniform(rng, 1, nq);
  ClaimVector v;
  for (int i = 0; i < len; ++i) v.push_back(Claim{"q" + num(qs[i]), num(uniform(rng, 0, nv - 1))});
  return v;
}

std::vector<Question> question_range(int n) {
  std::vector<Question> out;
  for (int i = 0; i < n; ++i) out.push_back("q" + num(i));
  return out;
}

Table random_table(Rng& rng, int nq, int nv, int support, bool sparse) {
  int rows = uniform(rng, 1, std::max(1, std::min(support, 8)));
  std::set<ClaimVector> seen;
  std::vector<ClaimVector> vecs;
  for (int i = 0; i < rows; ++i) {
    ClaimVector v = random_vector(rng, nq, nv);
    if (seen.insert(v).second) vecs.push_back(v);
  }
  auto masses = random_masses(rng, vecs.size(), sparse);
  Table t;
  for (std::size_t i = 0; i < vecs.size(); ++i)
    if (masses[i] > 0) t.push_back(Row{vecs[i], masses[i]});
  return t;
}

}  // namespace

Constructed construct_eps0(const std::string& kind, std::uint64_t seed) {
  Rng rng(splitmix(seed));
  return make_kind(kind, rng);
}

SmsSpec random_sms(const Profile& profile, std::uint64_t seed) {
  Rng rng(splitmix(seed));
  int nq = uniform(rng, 1, profile.questions), nv = uniform(rng, 1, profile.answers);
  SmsSpec s;
  s.questions = question_range(nq);
  s.answers = answer_range(nv);
  s.horizon = profile.horizon;
  s.mode = SmsMode::PerStep;
  for (int n = 0; n < profile.horizon; ++n) s.steps.push_back(random_table(rng, nq, nv, profile.support, profile.sparse));
  return s;
}

SmsSpec random_backward_consistent(const Profile& profile, std::uint64_t seed) {
  Rng rng(splitmix(seed));
  int nq = uniform(rng, 1, profile.questions), nv = uniform(rng, 1, profile.answers);
  int kappa = uniform(rng, 0, 1);
  SmsSpec s;
  s.questions = question_range(nq);
  s.answers = answer_range(nv);
  s.horizon = profile.horizon;
  s.mode = SmsMode::Kernel;
  s.kappa = kappa;

  s.init = random_table(rng, nq, nv, std::min(profile.support, 3), profile.sparse);
  std::set<ClaimVector> init_vecs;
  for (const auto& r : s.init) init_vecs.insert(r.vector);

  auto extend = [&](const ClaimVector& v) {
    std::set<Question> asked;
    for (const auto& c : v) asked.insert(c.question);
    std::vector<Question> free;
    for (const auto& q : s.questions)
      if (!asked.count(q)) free.push_back(q);
    std::shuffle(free.begin(), free.end(), rng);
    int add = free.empty() ? 0 : uniform(rng, 0, static_cast<int>(free.size()));
    ClaimVector out = v;
    for (int i = 0; i < add; ++i) out.push_back(Claim{free[i], num(uniform(rng, 0, nv - 1))});
    return out;
  };

  std::vector<ClaimVector> queue;
  if (kappa == 1) {
    for (const auto& r : s.init) {
      std::vector<ClaimVector> targets;
      int want = uniform(rng, 1, 2);
      for (int tries = 0; tries < 20 && static_cast<int>(targets.size()) < want; ++tries) {
        ClaimVector t = random_vector(rng, nq, nv);
        if (!init_vecs.count(t) && std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
      }
      if (targets.empty()) {
        // every candidate is a start state; hold instead
        s.kernel[r.vector] = Table{Row{r.vector, 1}};
        continue;
      }
      auto masses = random_masses(rng, targets.size());
      Table row;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        row.push_back(Row{targets[i], masses[i]});
        queue.push_back(targets[i]);
      }
      s.kernel[r.vector] = row;
    }
  } else {
    for (const auto& r : s.init) queue.push_back(r.vector);
  }

  std::set<ClaimVector> states(init_vecs);
  while (!queue.empty()) {
    ClaimVector v = queue.back();
    queue.pop_back();
    if (s.kernel.count(v)) continue;
    states.insert(v);
    std::vector<ClaimVector> next;
    int options = static_cast<int>(states.size()) >= profile.support ? 0 : uniform(rng, 1, 3);
    for (int i = 0; i < options; ++i) {
      ClaimVector t = extend(v);
      if (kappa == 1 && init_vecs.count(t)) t = v;
      if (std::find(next.begin(), next.end(), t) == next.end()) next.push_back(t);
    }
    if (next.empty()) next.push_back(v);
    auto masses = random_masses(rng, next.size());
    Table row;
    for (std::size_t i = 0; i < next.size(); ++i) {
      row.push_back(Row{next[i], masses[i]});
      if (!s.kernel.count(next[i]) && next[i] != v) {
        states.insert(next[i]);
        queue.push_back(next[i]);
      }
    }
    s.kernel[v] = row;
  }
  return s;
}

Scenario random_instance(const Profile& profile, std::uint64_t seed) {
  Scenario s;
  s.sms1 = profile.kernel ? random_backward_consistent(profile, seed) : random_sms(profile, seed);
  s.checks.push_back(CheckRequest{"validate", Json{{"sms", "sms1"}}});
  return s;
}

Scenario random_embedding_instance(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(splitmix(seed * 7919 + attempt));
    Profile p;
    p.questions = 3;
    p.answers = 3;
    SmsSpec flat = random_sms(p, seed * 7919 + attempt);
    Scenario s;
    s.sms1 = hold_kernel(flat.questions, flat.answers, flat.steps.front());
    std::map<Claim, Claim> claim_map;
    for (const auto& q : flat.questions) {
      int mode = uniform(rng, 0, 2);  // 0 drop, 1 rename, 2 rename and merge answers
      if (mode == 0) continue;
      for (const auto& a : flat.answers) claim_map[Claim{q, a}] = Claim{"s" + q, mode == 1 ? a : (a == "0" ? "0" : "1")};
    }
    s.E = EmbeddingMap::claimwise(support_sets(flat.steps.front()), claim_map);
    try {
      s.sms2 = image_of(s.sms1, *s.E);
    } catch (const DomainError&) {
      continue;  // some support set has an empty image
    }
    s.checks.push_back(CheckRequest{"embedding", Json::object()});
    return s;
  }
}

std::string ablation_prefix(const std::string& prop, const std::string& ablate) {
  if (ablate == "none" || ablate.empty()) return "";
  if (ablate.size() >= 3 && ablate.front() == '(' && ablate.back() == ')') return ablate;
  if (std::all_of(ablate.begin(), ablate.end(), ::isdigit)) return "(" + ablate + ")";
  bool evidence = prop == "p73" || prop == "p74" || prop == "p75";
  bool abduction = prop == "p81" || prop == "p82" || prop == "p83";
  if (!evidence && !abduction) throw DomainError("unknown proposition \"" + prop + "\"");
  if (ablate == "evidence" && evidence) return "(1)";
  if (ablate == "premise" && abduction) return "(1)";
  if (ablate == "pairs") return "(2)";
  if (ablate == "calibration") return evidence || prop == "p81" || prop == "p82" || prop == "p83" ? (evidence ? "(3)" : "(4)") : "";
  if (ablate == "support") return evidence ? "(4)" : "(5)";
  if (ablate == "proportionality" && prop == "p75") return "(5)";
  if (ablate == "marginalization" && abduction) return prop == "p83" ? "(3)" : "(6)";
  throw DomainError("unknown hypothesis label \"" + ablate + "\" for " + prop);
}

namespace {

Scenario search_family(const std::string& prop, const std::string& prefix, Rng& rng) {
  if (prop == "p73" && prefix == "(3)") {
    // Reasoner predictions increase with the count; the oracle's target law is arbitrary.
    EvidenceWorld w = random_evidence_world(rng, uniform(rng, 1, 3));
    std::vector<Rational> oracle;
    for (int k = 0; k <= w.n; ++k) oracle.push_back(rat(uniform(rng, 1, 15), 16));
    return evidence_math_scenario(w, oracle);
  }
  if (prop == "p81" && prefix == "(1)") {
    Joint J = random_joint(rng, rat(uniform(rng, 1, 4), 4));
    return abduction_math_scenario(J, uniform(rng, 0, 1));
  }
  if (prop == "p75" && prefix == "(5)") {
    // Two bits, an arbitrary non-constant label pattern and a random coarsening of the bits.
    EvidenceWorld w = random_evidence_world(rng, 2);
    std::vector<int> label(4);
    do {
      for (auto& l : label) l = uniform(rng, 0, 2);
    } while (std::all_of(label.begin(), label.end(), [&](int l) { return l == label[0]; }));
    std::set<int> used(label.begin(), label.end());
    std::map<int, int> compact;
    for (int l : used) compact.emplace(l, static_cast<int>(compact.size()));
    for (auto& l : label) l = compact[l];
    std::vector<bool> keep{uniform(rng, 0, 3) == 0, uniform(rng, 0, 3) == 0};
    return flipped_scenario(w, label, keep);
  }
  Scenario s = make_kind(prop, rng).scenario;
  return s;
}

bool is_counterexample(const CheckReport& rep, const std::string& prefix) {
  if (rep.conclusion.holds) return false;
  for (const auto& p : rep.preconditions) {
    bool ablated = !prefix.empty() && p.label.rfind(prefix, 0) == 0;
    if (!ablated && !p.holds) return false;
  }
  return true;
}

}  // namespace

SearchResult counterexample_search(const std::string& prop, const std::string& ablate, long trials,
                                   std::uint64_t seed) {
  static const std::set<std::string> props{"p73", "p74", "p75", "p81", "p82", "p83"};
  if (!props.count(prop)) throw DomainError("unknown proposition \"" + prop + "\"");
  std::string prefix = ablation_prefix(prop, ablate);
  VerifyOptions opt;
  opt.sweep = false;
  SearchResult res;
  for (long t = 0; t < trials; ++t) {
    Rng rng(splitmix(splitmix(seed) ^ static_cast<std::uint64_t>(t)));
    Scenario s = search_family(prop, prefix, rng);
    if (prop == "p73" && prefix.empty()) s.epsilon = p73_epsilon(s);
    CheckReport rep = run_check(s, s.checks.front(), seed, opt);
    res.trials = t + 1;
    if (is_counterexample(rep, prefix)) {
      res.found = true;
      res.scenario = s;
      res.report = rep;
      return res;
    }
  }
  return res;
}

}  // namespace smslab
