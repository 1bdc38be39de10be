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

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "incidx/buffers.hpp"
#include "incidx/config.hpp"
#include "incidx/dictionary.hpp"
#include "incidx/index.hpp"
#include "incidx/pool.hpp"

namespace incidx {

// Pre-tokenized document. Token i sits at position i + 1.
struct Document {
  DocId docid = 0;
  std::vector<std::string> tokens;
};

struct IndexerOptions {
  // Keep a FlushRecord per flush (tests and audits).
  bool record_flushes = false;
};

struct FlushRecord {
  TermId term = 0;
  std::uint32_t ordinal = 0;
  std::uint64_t capacity = 0;
  std::uint64_t postings = 0;
  bool final = false;
  std::vector<PoolOffset> segments;
};

// Document-at-a-time indexing loop over dictionary, buffer maps and pool.
// Single-threaded. finalize() hands the result off as an immutable Index.
class Indexer {
 public:
  explicit Indexer(const Config& config, PoolOptions pool_options = {},
                   IndexerOptions options = {});

  // Throws InputOrderError when docid does not exceed the previous docid and
  // CapacityError when the pool budget runs out (the indexer is unusable
  // afterwards).
  void index_document(DocId docid, std::span<const std::string_view> tokens);
  void index_document(const Document& doc);

  // Flushes the remaining buffers and drops sub-threshold terms. Throws
  // StateError when called twice.
  Index finalize();

  const Config& config() const { return config_; }
  const Dictionary& dictionary() const { return dictionary_; }
  const BufferMaps& buffers() const { return buffers_; }
  const SegmentPool& pool() const { return pool_; }
  const CollectionStats& collection() const { return stats_; }
  const std::vector<FlushRecord>& flush_log() const { return flush_log_; }
  std::uint64_t flush_count() const { return flushes_; }

 private:
  void check_usable() const;
  void route(const FlushRequest& flush);

  struct Pending {
    std::string_view term;
    std::uint32_t slot;
  };

  Config config_;
  IndexerOptions options_;
  Dictionary dictionary_;
  BufferMaps buffers_;
  SegmentPool pool_;
  CollectionStats stats_;
  std::vector<FlushRecord> flush_log_;
  std::uint64_t flushes_ = 0;
  bool finalized_ = false;
  bool failed_ = false;

  // Per-document scratch.
  std::unordered_map<std::string_view, std::uint32_t> doc_terms_;
  std::vector<Pending> pending_;
  std::vector<std::vector<std::uint32_t>> positions_;
};

// One parsed corpus line: "docid<TAB>token token ...". Tokens view into the
// line.
struct CorpusLine {
  DocId docid = 0;
  std::vector<std::string_view> tokens;
};

// Throws InputFormatError (tagged with line_number) on a missing tab, a
// non-decimal or out-of-range docid, or a token longer than 65535 bytes.
CorpusLine parse_corpus_line(std::string_view line, std::uint64_t line_number);

struct IngestProgress {
  std::uint64_t documents = 0;
  double elapsed_seconds = 0.0;
  double docs_per_second = 0.0;
  std::uint64_t pool_bytes = 0;
};

struct IngestOptions {
  // Skip malformed or out-of-order lines instead of throwing.
  bool skip_bad = false;
  // Emit a progress event every this many documents (0 disables).
  std::uint64_t progress_interval = 0;
  std::function<void(const IngestProgress&)> on_progress;
};

struct IngestSummary {
  std::uint64_t documents = 0;
  std::uint64_t bad_lines = 0;
  // Messages for skipped lines, at most 100 kept.
  std::vector<std::string> errors;
  double elapsed_seconds = 0.0;
};

IngestSummary ingest_stream(std::istream& in, Indexer& indexer,
                            const IngestOptions& options = {});

// A whole corpus held in memory as token views over one text buffer, so
// indexing can be timed without tokenization.
class Corpus {
 public:
  static Corpus read(std::istream& in);
  static Corpus read_file(const std::string& path);

  std::size_t size() const { return docids_.size(); }
  DocId docid(std::size_t i) const { return docids_[i]; }
  std::span<const std::string_view> tokens(std::size_t i) const {
    return std::span(tokens_).subspan(starts_[i], starts_[i + 1] - starts_[i]);
  }

 private:
  std::vector<char> text_;
  std::vector<DocId> docids_;
  std::vector<std::string_view> tokens_;
  std::vector<std::size_t> starts_{0};
};

// Indexes every document of corpus and finalizes.
Index build_index(const Corpus& corpus, const Config& config, PoolOptions pool_options = {});

}  // namespace incidx
