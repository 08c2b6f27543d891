#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smslab/claims.hpp"
#include "smslab/rational.hpp"
#include "smslab/report.hpp"

namespace smslab {

enum class SmsMode { PerStep, Kernel };

struct Row {
  ClaimVector vector;
  Rational p;
  bool operator==(const Row&) const = default;
};
using Table = std::vector<Row>;

struct SmsSpec {
  std::vector<Question> questions;
  std::vector<Answer> answers;
  int horizon = 1;
  SmsMode mode = SmsMode::PerStep;
  std::vector<Table> steps;              // per-step mode: steps[n-1] is the step-n table
  Table init;                            // kernel mode: step-1 table
  std::map<ClaimVector, Table> kernel;   // kernel mode: P(next | current)
  std::optional<int> kappa;

  bool operator==(const SmsSpec&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  [[nodiscard]] bool valid() const { return violations.empty(); }
};

[[nodiscard]] ValidationReport validate(const SmsSpec& spec);

// Enumeration cap (vector evaluations per operation). SMSLAB_BUDGET overrides the default 10^6.
[[nodiscard]] long enumeration_budget();

class Budget {
 public:
  Budget() : limit_(enumeration_budget()) {}
  explicit Budget(long limit) : limit_(limit) {}
  void charge(long n = 1);
  [[nodiscard]] long used() const { return used_; }

 private:
  long limit_;
  long used_ = 0;
};

using VectorDist = std::map<ClaimVector, Rational>;

// Law of the step-n claim vector (exact). Throws HorizonError when n is out of range.
[[nodiscard]] VectorDist step_vectors(const SmsSpec& spec, int n);
// Laws of steps 1..horizon in one pass.
[[nodiscard]] std::vector<VectorDist> all_step_vectors(const SmsSpec& spec);

[[nodiscard]] CheckReport check_nonrepeating(const SmsSpec& spec, int k);
[[nodiscard]] CheckReport check_backward_consistent(const SmsSpec& spec, int kappa);

// Smallest kappa < horizon for which the kernel is backward-consistent up to the horizon.
[[nodiscard]] std::optional<int> find_kappa(const SmsSpec& spec);

// Kernel spec whose step-1 table is `table` and every vector then repeats forever.
[[nodiscard]] SmsSpec hold_kernel(std::vector<Question> qs, std::vector<Answer> as, const Table& table,
                                  int horizon = 2);
[[nodiscard]] SmsSpec per_step(std::vector<Question> qs, std::vector<Answer> as, const Table& table);

}  // namespace smslab
