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
#include <vector>

#include "incidx/buffers.hpp"
#include "incidx/config.hpp"
#include "incidx/dictionary.hpp"
#include "incidx/pool.hpp"

namespace incidx {

// Global statistics needed by BM25. Docids arrive strictly increasing, so the
// length table is a pair of sorted parallel arrays.
class CollectionStats {
 public:
  void add_document(DocId docid, std::uint32_t length);

  std::uint64_t doc_count() const { return docids_.size(); }
  std::uint64_t total_tokens() const { return total_tokens_; }
  double avg_doclen() const {
    return docids_.empty() ? 0.0
                           : static_cast<double>(total_tokens_) /
                                 static_cast<double>(docids_.size());
  }

  // Length of docid. Throws InvariantViolation for an unknown docid.
  std::uint32_t doclen(DocId docid) const;

  const std::vector<DocId>& docids() const { return docids_; }
  const std::vector<std::uint32_t>& lengths() const { return lengths_; }

  friend bool operator==(const CollectionStats&, const CollectionStats&) = default;

 private:
  std::vector<DocId> docids_;
  std::vector<std::uint32_t> lengths_;
  std::uint64_t total_tokens_ = 0;
  // True while docids_ is first, first+1, ..., which allows direct indexing.
  bool dense_ = true;
};

// Accounting gathered while indexing, reported by the stats tooling.
struct BuildStats {
  BufferMemory peak_buffers;
  // Distinct terms seen, retained or not.
  std::uint64_t vocabulary_seen = 0;
  std::uint64_t discarded_terms = 0;
  // Entry j: retained terms whose largest docid buffer was 2^j * block size.
  std::vector<std::uint64_t> buffer_length_histogram;

  friend bool operator==(const BuildStats&, const BuildStats&) = default;
};

// Decoded postings of one term, in docid order.
struct TermPostings {
  std::vector<DocId> docids;
  std::vector<std::uint32_t> tfs;
  codec::PerDocPositions positions;

  friend bool operator==(const TermPostings&, const TermPostings&) = default;
};

// A finalized, immutable index. Safe to share between query threads.
class Index {
 public:
  Index(Config config, Lexicon lexicon, CollectionStats stats, BuildStats build,
        SegmentPool pool);

  Index(Index&&) noexcept = default;
  Index& operator=(Index&&) noexcept = default;

  const Config& config() const { return config_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const CollectionStats& collection() const { return stats_; }
  const BuildStats& build_stats() const { return build_; }
  const SegmentPool& pool() const { return pool_; }

  // Full chain walk of a term.
  TermPostings postings(TermId term) const;

 private:
  Config config_;
  Lexicon lexicon_;
  CollectionStats stats_;
  BuildStats build_;
  SegmentPool pool_;
};

}  // namespace incidx
