#include "smslab/embedding_map.hpp"

#include "smslab/errors.hpp"

namespace smslab {

EmbeddingMap::EmbeddingMap(std::map<ClaimSet, ClaimSet> table) : table_(std::move(table)) {
  for (const auto& [from, to] : table_) index_[to].insert(from);
}

EmbeddingMap EmbeddingMap::claimwise(const std::vector<ClaimSet>& universe_sets,
                                     const std::map<Claim, Claim>& claim_map) {
  std::map<ClaimSet, ClaimSet> table;
  for (const auto& u : universe_sets) {
    for (const auto& sub : all_subsets(u)) {
      if (table.count(sub)) continue;
      ClaimSet img;
      for (const auto& c : sub) {
        auto it = claim_map.find(c);
        if (it != claim_map.end()) img.insert(it->second);
      }
      table.emplace(sub, std::move(img));
    }
  }
  return EmbeddingMap(std::move(table));
}

const ClaimSet& EmbeddingMap::image(const ClaimSet& s) const {
  auto it = table_.find(s);
  if (it == table_.end()) throw DomainError("embedding map undefined at " + to_string(s));
  return it->second;
}

Collection EmbeddingMap::image(const Collection& c) const {
  Collection out;
  for (const auto& s : c) out.insert(image(s));
  return out;
}

Collection EmbeddingMap::preimage(const ClaimSet& y) const {
  auto it = index_.find(y);
  return it == index_.end() ? Collection{} : it->second;
}

Collection EmbeddingMap::preimage(const Collection& ys) const {
  Collection out;
  for (const auto& y : ys) {
    auto pre = preimage(y);
    out.insert(pre.begin(), pre.end());
  }
  return out;
}

}  // namespace smslab
