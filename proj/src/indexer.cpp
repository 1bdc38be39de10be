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

#include "incidx/indexer.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>

#include "incidx/error.hpp"

namespace incidx {

Indexer::Indexer(const Config& config, PoolOptions pool_options, IndexerOptions options)
    : config_(config),
      options_(options),
      buffers_(config),
      pool_(config.block_size, config.positional, pool_options) {}

void Indexer::check_usable() const {
  if (finalized_) throw StateError("indexer already finalized");
  if (failed_) throw StateError("indexer aborted after a capacity error");
}

void Indexer::route(const FlushRequest& flush) {
  TermEntry& entry = dictionary_.entry(flush.term_id);
  AppendResult result;
  try {
    result = pool_.append_segments(flush, entry.tail);
  } catch (const CapacityError&) {
    failed_ = true;
    throw;
  }
  if (entry.head == kNoOffset) entry.head = result.first;
  entry.tail = result.tail;
  ++flushes_;
  if (options_.record_flushes) {
    flush_log_.push_back({flush.term_id, flush.ordinal, flush.capacity,
                          flush.docids.size(), flush.final, std::move(result.segments)});
  }
}

void Indexer::index_document(DocId docid, std::span<const std::string_view> tokens) {
  check_usable();
  if (stats_.doc_count() > 0 && docid <= stats_.docids().back()) {
    throw InputOrderError("docid " + std::to_string(docid) + " does not follow " +
                          std::to_string(stats_.docids().back()));
  }

  doc_terms_.clear();
  pending_.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto token = tokens[i];
    if (token.empty()) throw InvariantViolation("empty token in document");
    if (token.size() > 0xFFFF) throw InputFormatError("token longer than 65535 bytes");
    auto [it, inserted] =
        doc_terms_.try_emplace(token, static_cast<std::uint32_t>(pending_.size()));
    if (inserted) {
      if (positions_.size() <= pending_.size()) positions_.emplace_back();
      positions_[pending_.size()].clear();
      pending_.push_back({token, it->second});
    }
    positions_[it->second].push_back(static_cast<std::uint32_t>(i + 1));
  }
  stats_.add_document(docid, static_cast<std::uint32_t>(tokens.size()));

  for (const auto& p : pending_) {
    const TermId id = dictionary_.lookup_or_insert(p.term);
    ++dictionary_.entry(id).df;
    const auto& positions = positions_[p.slot];
    const auto tf = static_cast<std::uint32_t>(positions.size());
    auto flush = buffers_.insert(id, docid, tf,
                                 config_.positional ? std::span(positions)
                                                    : std::span<const std::uint32_t>{});
    if (flush) route(*flush);
  }
}

void Indexer::index_document(const Document& doc) {
  std::vector<std::string_view> views(doc.tokens.begin(), doc.tokens.end());
  index_document(doc.docid, views);
}

Index Indexer::finalize() {
  check_usable();
  for (const auto& flush : buffers_.drain_all()) route(flush);
  finalized_ = true;

  std::vector<TermEntry> retained;
  BuildStats build;
  build.vocabulary_seen = dictionary_.size();
  for (const auto& entry : dictionary_.entries()) {
    if (buffers_.retained(entry.term_id)) {
      retained.push_back(entry);
    } else {
      ++build.discarded_terms;
    }
  }
  build.peak_buffers = buffers_.peak_memory_report();
  build.buffer_length_histogram = buffers_.buffer_length_histogram();
  return Index(config_, Lexicon(std::move(retained)), std::move(stats_), std::move(build),
               std::move(pool_));
}

CorpusLine parse_corpus_line(std::string_view line, std::uint64_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw InputFormatError("missing TAB after docid", line_number);
  }
  CorpusLine out;
  const auto id = line.substr(0, tab);
  const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), out.docid);
  if (id.empty() || ec != std::errc{} || ptr != id.data() + id.size()) {
    throw InputFormatError("docid '" + std::string(id) + "' is not a 32-bit decimal",
                           line_number);
  }
  std::string_view rest = line.substr(tab + 1);
  while (!rest.empty()) {
    const auto space = rest.find(' ');
    const auto token = rest.substr(0, space);
    if (!token.empty()) {
      if (token.size() > 0xFFFF) {
        throw InputFormatError("token longer than 65535 bytes", line_number);
      }
      out.tokens.push_back(token);
    }
    if (space == std::string_view::npos) break;
    rest.remove_prefix(space + 1);
  }
  return out;
}

IngestSummary ingest_stream(std::istream& in, Indexer& indexer,
                            const IngestOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  IngestSummary summary;
  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    try {
      const auto parsed = parse_corpus_line(line, line_number);
      try {
        indexer.index_document(parsed.docid, parsed.tokens);
      } catch (const InputOrderError& e) {
        throw InputFormatError(e.what(), line_number);
      }
    } catch (const InputFormatError& e) {
      if (!options.skip_bad) throw;
      ++summary.bad_lines;
      if (summary.errors.size() < 100) summary.errors.emplace_back(e.what());
      continue;
    }
    ++summary.documents;
    if (options.progress_interval > 0 && options.on_progress &&
        summary.documents % options.progress_interval == 0) {
      const double secs = elapsed();
      options.on_progress({summary.documents, secs,
                           secs > 0 ? static_cast<double>(summary.documents) / secs : 0.0,
                           indexer.pool().end()});
    }
  }
  if (in.bad()) throw IoError("read error on corpus stream");
  summary.elapsed_seconds = elapsed();
  return summary;
}

Corpus Corpus::read(std::istream& in) {
  Corpus corpus;
  corpus.text_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read error on corpus stream");
  std::string_view text(corpus.text_.data(), corpus.text_.size());
  std::uint64_t line_number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    ++line_number;
    if (!line.empty() && line != "\r") {
      auto parsed = parse_corpus_line(line, line_number);
      if (!corpus.docids_.empty() && parsed.docid <= corpus.docids_.back()) {
        throw InputFormatError("docid does not increase", line_number);
      }
      corpus.docids_.push_back(parsed.docid);
      corpus.tokens_.insert(corpus.tokens_.end(), parsed.tokens.begin(),
                            parsed.tokens.end());
      corpus.starts_.push_back(corpus.tokens_.size());
    }
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return corpus;
}

Corpus Corpus::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus '" + path + "'");
  return read(in);
}

Index build_index(const Corpus& corpus, const Config& config, PoolOptions pool_options) {
  Indexer indexer(config, pool_options);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    indexer.index_document(corpus.docid(i), corpus.tokens(i));
  }
  return indexer.finalize();
}

}  // namespace incidx
