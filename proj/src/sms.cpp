#include "smslab/sms.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "smslab/errors.hpp"

namespace smslab {

long enumeration_budget() {
  if (const char* env = std::getenv("SMSLAB_BUDGET")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 1'000'000;
}

void Budget::charge(long n) {
  used_ += n;
  if (used_ > limit_)
    throw BudgetError("enumeration budget exceeded (" + std::to_string(limit_) +
                      " vector evaluations); raise SMSLAB_BUDGET to continue");
}

namespace {

void check_table(const SmsSpec& spec, const Table& table, const std::string& label,
                 std::vector<std::string>& out) {
  std::set<Question> qs(spec.questions.begin(), spec.questions.end());
  std::set<Answer> as(spec.answers.begin(), spec.answers.end());
  Rational total = 0;
  for (const auto& row : table) {
    if (row.p < 0) out.push_back(label + ": negative probability " + to_string(row.p));
    total += row.p;
    if (row.p == 0) continue;
    if (row.vector.empty()) out.push_back(label + ": empty vector in support");
    std::set<Claim> seen;
    for (const auto& c : row.vector) {
      if (!qs.count(c.question)) out.push_back(label + ": unknown question " + c.question);
      if (!as.count(c.answer)) out.push_back(label + ": unknown answer " + c.answer);
      if (!seen.insert(c).second)
        out.push_back(label + ": duplicate claim " + to_string(c) + " in " + to_string(row.vector));
    }
  }
  if (total != 1) out.push_back(label + ": table sums to " + to_string(total));
}

}  // namespace

ValidationReport validate(const SmsSpec& spec) {
  ValidationReport rep;
  auto& out = rep.violations;
  {
    std::set<Question> qs(spec.questions.begin(), spec.questions.end());
    if (qs.size() != spec.questions.size()) out.push_back("duplicate question identifier");
    std::set<Answer> as(spec.answers.begin(), spec.answers.end());
    if (as.size() != spec.answers.size()) out.push_back("duplicate answer identifier");
  }
  if (spec.horizon < 1) out.push_back("horizon must be positive");
  if (spec.kappa && (*spec.kappa < 0 || *spec.kappa >= spec.horizon))
    out.push_back("kappa must lie in [0, horizon)");

  if (spec.mode == SmsMode::PerStep) {
    if (static_cast<int>(spec.steps.size()) != spec.horizon)
      out.push_back("per-step mode needs one table per step (" + std::to_string(spec.steps.size()) +
                    " tables for horizon " + std::to_string(spec.horizon) + ")");
    for (std::size_t i = 0; i < spec.steps.size(); ++i)
      check_table(spec, spec.steps[i], "step " + std::to_string(i + 1), out);
    return rep;
  }

  check_table(spec, spec.init, "init", out);
  for (const auto& [from, row] : spec.kernel)
    check_table(spec, row, "kernel row " + to_string(from), out);
  if (!out.empty()) return rep;

  // Every vector reachable before the horizon needs a transition row.
  std::set<ClaimVector> frontier;
  for (const auto& r : spec.init)
    if (r.p > 0) frontier.insert(r.vector);
  std::set<ClaimVector> reported;
  for (int step = 1; step < spec.horizon; ++step) {
    std::set<ClaimVector> next;
    for (const auto& v : frontier) {
      auto it = spec.kernel.find(v);
      if (it == spec.kernel.end()) {
        if (reported.insert(v).second)
          out.push_back("no kernel row for reachable vector " + to_string(v) + " at step " +
                        std::to_string(step));
        continue;
      }
      for (const auto& r : it->second)
        if (r.p > 0) next.insert(r.vector);
    }
    frontier = std::move(next);
  }
  return rep;
}

std::vector<VectorDist> all_step_vectors(const SmsSpec& spec) {
  Budget budget;
  std::vector<VectorDist> out;
  if (spec.mode == SmsMode::PerStep) {
    for (const auto& table : spec.steps) {
      VectorDist d;
      for (const auto& r : table) {
        budget.charge();
        if (r.p > 0) d[r.vector] += r.p;
      }
      out.push_back(std::move(d));
    }
    return out;
  }
  VectorDist cur;
  for (const auto& r : spec.init) {
    budget.charge();
    if (r.p > 0) cur[r.vector] += r.p;
  }
  out.push_back(cur);
  for (int step = 2; step <= spec.horizon; ++step) {
    VectorDist next;
    for (const auto& [v, p] : cur) {
      auto it = spec.kernel.find(v);
      if (it == spec.kernel.end())
        throw StructuralError("no kernel row for reachable vector " + to_string(v));
      for (const auto& r : it->second) {
        budget.charge();
        if (r.p > 0) next[r.vector] += p * r.p;
      }
    }
    cur = std::move(next);
    out.push_back(cur);
  }
  return out;
}

VectorDist step_vectors(const SmsSpec& spec, int n) {
  if (n < 1 || n > spec.horizon)
    throw HorizonError("step " + std::to_string(n) + " outside 1.." + std::to_string(spec.horizon));
  if (spec.mode == SmsMode::PerStep) {
    VectorDist d;
    for (const auto& r : spec.steps.at(n - 1))
      if (r.p > 0) d[r.vector] += r.p;
    return d;
  }
  auto all = all_step_vectors(SmsSpec{spec.questions, spec.answers, n, spec.mode, spec.steps,
                                      spec.init, spec.kernel, std::nullopt});
  return all.back();
}

CheckReport check_nonrepeating(const SmsSpec& spec, int k) {
  if (k < 0 || k > spec.horizon)
    throw HorizonError("step " + std::to_string(k) + " beyond horizon " + std::to_string(spec.horizon));
  CheckReport rep("nonrepeating");
  rep.require("valid spec", validate(spec).valid());
  auto laws = all_step_vectors(spec);
  rep.conclusion.holds = true;
  for (int n = k + 1; n <= spec.horizon && rep.conclusion.holds; ++n) {
    for (const auto& [v, p] : laws[n - 1]) {
      std::set<Question> seen;
      bool repeat = false;
      for (const auto& c : v)
        if (!seen.insert(c.question).second) repeat = true;
      if (repeat) {
        rep.conclusion.holds = false;
        rep.conclusion.lhs = Json{{"step", n}, {"vector", to_string(v)}, {"p", to_string(p)}};
        break;
      }
    }
  }
  rep.details["after_step"] = k;
  rep.details["checked_through"] = spec.horizon;
  rep.finish();
  return rep;
}

namespace {

struct BcResult {
  bool holds = true;
  std::vector<ClaimVector> witness;
};

BcResult scan_backward_consistency(const SmsSpec& spec, int kappa) {
  // Predecessor maps let a violation be reported as a full positive-probability trajectory.
  std::vector<std::map<ClaimVector, ClaimVector>> pred(spec.horizon + 1);
  std::set<ClaimVector> cur;
  for (const auto& r : spec.init)
    if (r.p > 0) cur.insert(r.vector);
  Budget budget;
  for (int step = 1; step < spec.horizon; ++step) {
    std::set<ClaimVector> next;
    for (const auto& v : cur) {
      auto it = spec.kernel.find(v);
      if (it == spec.kernel.end()) continue;
      ClaimSet from = unorder(v);
      for (const auto& r : it->second) {
        budget.charge();
        if (r.p <= 0) continue;
        if (!pred[step + 1].count(r.vector)) pred[step + 1][r.vector] = v;
        next.insert(r.vector);
        if (step > kappa && !is_subset(from, unorder(r.vector))) {
          BcResult res{false, {}};
          res.witness.push_back(r.vector);
          ClaimVector back = v;
          for (int s = step; s >= 1; --s) {
            res.witness.push_back(back);
            if (s > 1) back = pred[s].at(back);
          }
          std::reverse(res.witness.begin(), res.witness.end());
          return res;
        }
      }
    }
    cur = std::move(next);
  }
  return {};
}

}  // namespace

CheckReport check_backward_consistent(const SmsSpec& spec, int kappa) {
  if (spec.mode != SmsMode::Kernel)
    throw UnsupportedModeError("backward-consistency needs kernel mode");
  if (kappa < 0 || kappa >= spec.horizon)
    throw HorizonError("kappa must lie in [0, horizon)");
  CheckReport rep("backward-consistent");
  rep.require("valid spec", validate(spec).valid());
  auto res = scan_backward_consistency(spec, kappa);
  rep.conclusion.holds = res.holds;
  if (!res.holds) {
    Json traj = Json::array();
    for (const auto& v : res.witness) traj.push_back(to_string(v));
    rep.conclusion.lhs = Json{{"trajectory", traj}};
  }
  rep.details["kappa"] = kappa;
  rep.details["scope"] = "verified up to horizon " + std::to_string(spec.horizon);
  rep.finish();
  return rep;
}

std::optional<int> find_kappa(const SmsSpec& spec) {
  if (spec.mode != SmsMode::Kernel) return std::nullopt;
  for (int k = 0; k < spec.horizon; ++k)
    if (scan_backward_consistency(spec, k).holds) return k;
  return std::nullopt;
}

SmsSpec hold_kernel(std::vector<Question> qs, std::vector<Answer> as, const Table& table, int horizon) {
  SmsSpec s;
  s.questions = std::move(qs);
  s.answers = std::move(as);
  s.horizon = horizon;
  s.mode = SmsMode::Kernel;
  s.init = table;
  for (const auto& r : table)
    if (r.p > 0) s.kernel[r.vector] = Table{Row{r.vector, 1}};
  s.kappa = 0;
  return s;
}

SmsSpec per_step(std::vector<Question> qs, std::vector<Answer> as, const Table& table) {
  SmsSpec s;
  s.questions = std::move(qs);
  s.answers = std::move(as);
  s.horizon = 1;
  s.mode = SmsMode::PerStep;
  s.steps = {table};
  return s;
}

}  // namespace smslab
