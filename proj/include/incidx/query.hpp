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
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incidx/index.hpp"

namespace incidx {

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

// Okapi BM25 with +1 idf smoothing:
//   idf   = ln((N - df + 0.5) / (df + 0.5) + 1)
//   score = idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * doclen / avg_doclen))
double bm25_score(std::uint32_t tf, std::uint32_t df, std::uint32_t doclen,
                  std::uint64_t doc_count, double avg_doclen, const Bm25Params& params = {});

// Forward iterator over a term's segment chain. Docids of the current
// segment are decoded on load; tfs only when first asked for.
class PostingsCursor {
 public:
  PostingsCursor(const SegmentPool& pool, PoolOffset head);

  bool exhausted() const { return exhausted_; }
  DocId docid() const { return docids_[index_]; }
  std::uint32_t tf();

  void next();

  // Moves to the first posting with docid >= target: doubling probe within
  // the current segment, then binary search over the bracket. Segments whose
  // last docid is below target are passed over by following next pointers.
  // Returns false once exhausted.
  bool advance(DocId target);

  std::uint64_t segments_loaded() const { return segments_loaded_; }

 private:
  void load(PoolOffset offset);

  const SegmentPool* pool_;
  SegmentView segment_;
  std::vector<DocId> docids_;
  std::vector<std::uint32_t> tfs_;
  std::size_t index_ = 0;
  bool tfs_ready_ = false;
  bool exhausted_ = false;
  std::uint64_t segments_loaded_ = 0;
};

inline constexpr DocId kExhausted = std::numeric_limits<DocId>::max();

// Cursor-level galloping search; kExhausted when no docid >= target remains.
DocId gallop_advance(PostingsCursor& cursor, DocId target);

// Conjunctive intersection, shortest list first. Empty for an empty query.
std::vector<DocId> svs_intersect(const Index& index, std::span<const TermId> terms);

struct ScoredHit {
  DocId docid = 0;
  double score = 0.0;

  friend bool operator==(const ScoredHit&, const ScoredHit&) = default;
};

// Result order: score descending, then docid ascending.
bool ranks_before(const ScoredHit& a, const ScoredHit& b);

// Per-term maximum BM25 contribution over all of its postings.
std::vector<double> prepare_upper_bounds(const Index& index, const Bm25Params& params = {});

// Exact disjunctive top-k with WAND pivoting. upper_bounds comes from
// prepare_upper_bounds for the same index and params. Throws
// InvariantViolation when k == 0.
std::vector<ScoredHit> wand_topk(const Index& index, std::span<const TermId> terms,
                                 std::size_t k, std::span<const double> upper_bounds,
                                 const Bm25Params& params = {});

enum class QueryMode : std::uint8_t { kSvs, kWand };

// Terms of one line of a query file (space separated, empties dropped).
std::vector<std::string> parse_query_line(std::string_view line);
std::vector<std::vector<std::string>> read_queries(std::istream& in);
std::vector<std::vector<std::string>> read_queries_file(const std::string& path);

struct QueryResult {
  // Number of matching documents (SvS) or returned hits (WAND).
  std::size_t count = 0;
  std::vector<DocId> docids;
  std::vector<ScoredHit> hits;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

// Maps query strings to term ids and runs either evaluator. Duplicate terms
// count once. A term missing from the lexicon empties an SvS query and is
// dropped from a WAND query. Read-only; share one engine between threads.
class QueryEngine {
 public:
  explicit QueryEngine(const Index& index, Bm25Params params = {});
  QueryEngine(const Index& index, std::vector<double> upper_bounds, Bm25Params params = {});

  QueryResult run(std::span<const std::string> terms, QueryMode mode, std::size_t k) const;

  std::vector<DocId> svs(std::span<const std::string> terms) const;
  std::vector<ScoredHit> wand(std::span<const std::string> terms, std::size_t k) const;

  const Index& index() const { return *index_; }
  const std::vector<double>& upper_bounds() const { return bounds_; }
  const Bm25Params& params() const { return params_; }

 private:
  // Distinct ids of found terms in query order; missing is set when any
  // term is absent.
  std::vector<TermId> resolve(std::span<const std::string> terms, bool& missing) const;

  const Index* index_;
  Bm25Params params_;
  std::vector<double> bounds_;
};

}  // namespace incidx
