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

// Measurement harness: synthetic Zipfian corpora and queries, query latency
// by layout, indexing throughput, and buffer-memory reports.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "incidx/indexer.hpp"
#include "incidx/parallel.hpp"
#include "incidx/query.hpp"

namespace incidx::bench {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF sampler over ranks 0..n-1 with P(r) proportional to (r+1)^-s.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s);
  std::uint64_t operator()(std::mt19937_64& rng) const;
  std::uint64_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

std::string term_for_rank(std::uint64_t rank);

struct SynthParams {
  std::uint64_t doc_count = 1000;
  std::uint64_t vocab_size = 10000;
  double zipf_s = 1.2;
  // Lengths are uniform on [1, 2 * avg_len - 1].
  double avg_len = 50.0;
  std::uint64_t seed = 1;
};

// Writes doc_count lines "docid<TAB>tokens" with docids 0..doc_count-1.
// Throws InvariantViolation on non-positive parameters.
void synth_corpus(const SynthParams& params, std::ostream& out);

struct QuerySynthParams {
  std::uint64_t count = 1000;
  std::uint32_t min_terms = 1;
  std::uint32_t max_terms = 5;
  // Query terms are drawn Zipf(zipf_s) from the most frequent vocab_size
  // ranks.
  std::uint64_t vocab_size = 5000;
  double zipf_s = 1.0;
  std::uint64_t seed = 7;
};

parallel::QueryBatch synth_queries(const QuerySynthParams& params);
void write_queries(const parallel::QueryBatch& queries, std::ostream& out);

// Two-sided 95% Student-t critical value for the given degrees of freedom.
double student_t_975(std::uint64_t degrees_of_freedom);

struct MeanCi {
  double mean = 0.0;
  // Half-width of the 95% interval; nullopt with fewer than two samples.
  std::optional<double> half_width;
};

MeanCi mean_ci(std::span<const double> samples);

// One layout under test: a cap exponent, or the compacted layout.
struct LayoutConfig {
  std::string label;
  std::uint32_t cap_exponent = 0;
  bool compact = false;
};

// "1b", "32b", "5", or "COMPACT".
LayoutConfig parse_layout(const std::string& text);
std::vector<LayoutConfig> parse_layouts(const std::string& comma_separated);

// Query-length buckets: "1".."4", "5+", plus "all".
std::string length_bucket(std::size_t terms);

struct LatencyRow {
  std::string config;
  QueryMode mode = QueryMode::kSvs;
  std::string bucket;
  double mean_ms = 0.0;
  std::optional<double> ci_ms;
  std::size_t trials = 0;
  // Mean per-query latency of each trial, in ms.
  std::vector<double> trial_ms;
};

struct LatencyReport {
  std::vector<LatencyRow> rows;

  const LatencyRow* find(const std::string& config, const std::string& bucket = "all") const;
};

struct LatencyOptions {
  QueryMode mode = QueryMode::kSvs;
  std::size_t k = 1000;
  std::size_t trials = 5;
  Config base;
  PoolOptions pool;
};

// Builds one index per layout (COMPACT compacts the 1b build), checks that
// every layout returns identical results for the whole batch (throws
// InvariantViolation otherwise), then times the batch trials times per
// layout. Layouts are interleaved within each trial. The verification pass
// doubles as the warmup.
LatencyReport run_latency_suite(const Corpus& corpus, const parallel::QueryBatch& queries,
                                std::span<const LayoutConfig> layouts,
                                const LatencyOptions& options);

// Same, against prebuilt indexes (one per layout, in order).
LatencyReport run_latency_suite(std::span<const Index* const> indexes,
                                std::span<const LayoutConfig> layouts,
                                const parallel::QueryBatch& queries,
                                const LatencyOptions& options);

struct IndexingRow {
  std::string config;
  std::size_t documents = 0;
  std::size_t trials = 0;
  double mean_s = 0.0;
  std::optional<double> ci_s;
  double docs_per_sec = 0.0;
  std::vector<double> trial_s;
};

// Wall time to index the in-memory corpus and finalize, per cap exponent.
std::vector<IndexingRow> run_indexing_suite(const Corpus& corpus,
                                            std::span<const std::uint32_t> cap_exponents,
                                            const Config& base, std::size_t trials = 3,
                                            PoolOptions pool = {});

struct MemoryReport {
  std::string config;
  BufferMemory peak_buffers;
  std::uint64_t pool_bytes = 0;
  std::uint64_t pool_allocated_bytes = 0;
  std::uint64_t vocabulary_seen = 0;
  std::uint64_t retained_terms = 0;
  std::uint64_t discarded_terms = 0;
  std::uint64_t segments = 0;
  // Entry j: share of retained terms whose largest buffer was 2^j * b.
  std::vector<double> buffer_length_fractions;
};

MemoryReport stats_report(const Index& index);

void write_latency_csv(const LatencyReport& report, std::ostream& out);
void write_indexing_csv(std::span<const IndexingRow> rows, std::ostream& out);
void write_memory_csv(std::span<const MemoryReport> reports, std::ostream& out);
void write_memory_text(const MemoryReport& report, std::ostream& out);

}  // namespace incidx::bench
