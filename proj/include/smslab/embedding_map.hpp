#pragma once

#include <map>
#include <optional>
#include <vector>

#include "smslab/claims.hpp"

namespace smslab {

// Partial map from universe claim sets to scientist claim sets, as an explicit table.
// The preimage of a scientist set Y is the collection of table entries whose image is exactly Y.
class EmbeddingMap {
 public:
  EmbeddingMap() = default;
  explicit EmbeddingMap(std::map<ClaimSet, ClaimSet> table);

  // Table over every subset of every given universe set, mapping each claim through `claim_map`
  // (claims without an entry are dropped from the image).
  static EmbeddingMap claimwise(const std::vector<ClaimSet>& universe_sets,
                                const std::map<Claim, Claim>& claim_map);

  [[nodiscard]] const std::map<ClaimSet, ClaimSet>& table() const { return table_; }
  [[nodiscard]] bool defined(const ClaimSet& s) const { return table_.count(s) > 0; }
  // Throws DomainError outside the domain.
  [[nodiscard]] const ClaimSet& image(const ClaimSet& s) const;
  [[nodiscard]] Collection image(const Collection& c) const;
  [[nodiscard]] Collection preimage(const ClaimSet& y) const;
  [[nodiscard]] Collection preimage(const Collection& ys) const;

  bool operator==(const EmbeddingMap& o) const { return table_ == o.table_; }

 private:
  std::map<ClaimSet, ClaimSet> table_;
  std::map<ClaimSet, Collection> index_;
};

}  // namespace smslab
