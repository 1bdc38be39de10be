/*
   Copyright 2026 The incidx Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "incidx/dictionary.hpp"

#include "incidx/error.hpp"

namespace incidx {

std::uint32_t bitwise_hash(std::string_view term, std::uint64_t bucket_count) {
  std::uint32_t h = 0;
  for (unsigned char c : term) h = ((h << 5) + h) ^ c;
  return static_cast<std::uint32_t>(h & (bucket_count - 1));
}

Dictionary::Dictionary(std::uint64_t initial_buckets) {
  if (initial_buckets == 0 || (initial_buckets & (initial_buckets - 1)) != 0) {
    throw InvariantViolation("dictionary bucket count must be a power of two");
  }
  buckets_.assign(initial_buckets, kNil);
}

std::optional<TermId> Dictionary::find_and_promote(std::string_view term,
                                                   std::uint32_t bucket) {
  std::uint32_t prev = kNil;
  for (std::uint32_t cur = buckets_[bucket]; cur != kNil; prev = cur, cur = next_[cur]) {
    if (entries_[cur].term != term) continue;
    if (prev != kNil) {
      next_[prev] = next_[cur];
      next_[cur] = buckets_[bucket];
      buckets_[bucket] = cur;
    }
    return cur;
  }
  return std::nullopt;
}

TermId Dictionary::lookup_or_insert(std::string_view term) {
  if (term.empty()) throw InvariantViolation("dictionary: empty term");
  const auto bucket = bitwise_hash(term, buckets_.size());
  if (auto hit = find_and_promote(term, bucket)) return *hit;

  const auto id = static_cast<TermId>(entries_.size());
  TermEntry entry;
  entry.term = std::string(term);
  entry.term_id = id;
  entries_.push_back(std::move(entry));
  // New terms join at the tail of the chain.
  next_.push_back(kNil);
  std::uint32_t* link = &buckets_[bucket];
  while (*link != kNil) link = &next_[*link];
  *link = id;

  if (static_cast<double>(entries_.size()) >
      kMaxLoadFactor * static_cast<double>(buckets_.size())) {
    grow();
  }
  return id;
}

std::optional<TermId> Dictionary::lookup(std::string_view term) {
  return find_and_promote(term, bitwise_hash(term, buckets_.size()));
}

std::vector<TermId> Dictionary::chain_for(std::string_view term) const {
  std::vector<TermId> chain;
  for (auto cur = buckets_[bitwise_hash(term, buckets_.size())]; cur != kNil;
       cur = next_[cur]) {
    chain.push_back(cur);
  }
  return chain;
}

void Dictionary::grow() {
  std::vector<std::uint32_t> old = std::move(buckets_);
  buckets_.assign(old.size() * 2, kNil);
  // Re-thread every old chain front to back so relative (recency) order within
  // each new bucket is preserved.
  std::vector<std::uint32_t> tails(buckets_.size(), kNil);
  for (auto head : old) {
    for (auto cur = head; cur != kNil;) {
      const auto following = next_[cur];
      const auto b = bitwise_hash(entries_[cur].term, buckets_.size());
      next_[cur] = kNil;
      if (tails[b] == kNil) {
        buckets_[b] = cur;
      } else {
        next_[tails[b]] = cur;
      }
      tails[b] = cur;
      cur = following;
    }
  }
}

Lexicon::Lexicon(std::vector<TermEntry> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (TermId id = 0; id < entries_.size(); ++id) {
    entries_[id].term_id = id;
    index_.emplace(entries_[id].term, id);
  }
}

std::optional<TermId> Lexicon::lookup(std::string_view term) const {
  const auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Lexicon::set_chain(TermId id, PoolOffset head, PoolOffset tail) {
  entries_[id].head = head;
  entries_[id].tail = tail;
}

}  // namespace incidx
