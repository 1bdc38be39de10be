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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace incidx {

using TermId = std::uint32_t;
using DocId = std::uint32_t;
using PoolOffset = std::uint64_t;

// Reserved offset marking "no segment" in head/tail fields and next pointers.
inline constexpr PoolOffset kNoOffset = ~PoolOffset{0};

struct TermEntry {
  std::string term;
  TermId term_id = 0;
  std::uint32_t df = 0;
  PoolOffset head = kNoOffset;
  PoolOffset tail = kNoOffset;
};

// Shift-add-xor string hash, h = (h * 33) ^ byte, masked to bucket_count
// (a power of two).
std::uint32_t bitwise_hash(std::string_view term, std::uint64_t bucket_count);

// Term -> dense id map used while indexing: chained hashing where every hit
// moves the entry to the front of its chain. Even lookups mutate, so the
// dictionary is single-threaded; see Lexicon for the read-only form.
class Dictionary {
 public:
  static constexpr std::uint64_t kInitialBuckets = std::uint64_t{1} << 16;
  // Rehash into twice as many buckets once entries exceed this many per bucket.
  static constexpr double kMaxLoadFactor = 2.0;

  explicit Dictionary(std::uint64_t initial_buckets = kInitialBuckets);

  // Returns the id of term, inserting it with the next sequential id when new.
  TermId lookup_or_insert(std::string_view term);

  std::optional<TermId> lookup(std::string_view term);

  std::size_t size() const { return entries_.size(); }
  std::uint64_t bucket_count() const { return buckets_.size(); }

  TermEntry& entry(TermId id) { return entries_[id]; }
  const TermEntry& entry(TermId id) const { return entries_[id]; }
  const std::vector<TermEntry>& entries() const { return entries_; }

  // Term ids in chain order for the bucket term hashes to.
  std::vector<TermId> chain_for(std::string_view term) const;

 private:
  static constexpr std::uint32_t kNil = ~std::uint32_t{0};

  // Finds term; on a hit, moves it to the front of its chain.
  std::optional<TermId> find_and_promote(std::string_view term, std::uint32_t bucket);
  void grow();

  std::vector<TermEntry> entries_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> buckets_;
};

// Immutable term table built at finalize: only retained terms, renumbered
// densely in original id order. Safe for concurrent readers.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<TermEntry> entries);
  Lexicon(const Lexicon& other) : Lexicon(other.entries_) {}
  Lexicon& operator=(const Lexicon& other) {
    if (this != &other) *this = Lexicon(other.entries_);
    return *this;
  }
  Lexicon(Lexicon&&) noexcept = default;
  Lexicon& operator=(Lexicon&&) noexcept = default;

  std::optional<TermId> lookup(std::string_view term) const;

  std::size_t size() const { return entries_.size(); }
  const TermEntry& entry(TermId id) const { return entries_[id]; }
  const std::vector<TermEntry>& entries() const { return entries_; }

  // Only for rewriting chain offsets (compaction).
  void set_chain(TermId id, PoolOffset head, PoolOffset tail);

 private:
  std::vector<TermEntry> entries_;
  std::unordered_map<std::string_view, TermId> index_;
};

}  // namespace incidx
