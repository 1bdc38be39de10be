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

#include "incidx/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>

#include "incidx/error.hpp"
#include "incidx/index_io.hpp"

namespace incidx::bench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const char* mode_name(QueryMode mode) { return mode == QueryMode::kSvs ? "svs" : "wand"; }

bool results_match(const QueryResult& a, const QueryResult& b) {
  if (a.count != b.count || a.docids != b.docids || a.hits.size() != b.hits.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.hits.size(); ++i) {
    if (a.hits[i].docid != b.hits[i].docid) return false;
    if (std::abs(a.hits[i].score - b.hits[i].score) > 1e-9) return false;
  }
  return true;
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) {
    out << *v;
  } else {
    out << "NA";
  }
}

}  // namespace

ZipfSampler::ZipfSampler(std::uint64_t n, double s) {
  if (n == 0 || !(s > 0.0)) throw InvariantViolation("zipf: need n >= 1 and s > 0");
  cdf_.resize(n);
  double total = 0.0;
  for (std::uint64_t r = 0; r < n; ++r) {
    total += std::pow(static_cast<double>(r + 1), -s);
    cdf_[r] = total;
  }
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::uint64_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  const double u = uniform01(rng);
  return static_cast<std::uint64_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) -
                                    cdf_.begin());
}

std::string term_for_rank(std::uint64_t rank) { return "t" + std::to_string(rank); }

void synth_corpus(const SynthParams& params, std::ostream& out) {
  if (params.vocab_size == 0 || !(params.zipf_s > 0.0) || !(params.avg_len >= 1.0)) {
    throw InvariantViolation("synth: vocab_size, zipf_s must be positive and avg_len >= 1");
  }
  const ZipfSampler zipf(params.vocab_size, params.zipf_s);
  std::mt19937_64 rng(params.seed);
  const auto max_len =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(2.0 * params.avg_len - 1.0)));

  std::vector<std::string> names(params.vocab_size);
  for (std::uint64_t r = 0; r < params.vocab_size; ++r) names[r] = term_for_rank(r);

  std::string line;
  for (std::uint64_t d = 0; d < params.doc_count; ++d) {
    const auto len = 1 + static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(max_len));
    line.assign(std::to_string(d));
    line.push_back('\t');
    for (std::uint64_t i = 0; i < len; ++i) {
      if (i > 0) line.push_back(' ');
      line.append(names[zipf(rng)]);
    }
    line.push_back('\n');
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw IoError("write error on corpus stream");
}

parallel::QueryBatch synth_queries(const QuerySynthParams& params) {
  if (params.min_terms < 1 || params.max_terms < params.min_terms) {
    throw InvariantViolation("synth queries: need 1 <= min_terms <= max_terms");
  }
  const ZipfSampler zipf(params.vocab_size, params.zipf_s);
  std::mt19937_64 rng(params.seed);
  const auto span = params.max_terms - params.min_terms + 1;
  parallel::QueryBatch queries;
  queries.reserve(params.count);
  for (std::uint64_t q = 0; q < params.count; ++q) {
    const auto n = params.min_terms +
                   static_cast<std::uint32_t>(uniform01(rng) * static_cast<double>(span));
    std::vector<std::string> terms;
    while (terms.size() < n) {
      auto term = term_for_rank(zipf(rng));
      if (std::find(terms.begin(), terms.end(), term) == terms.end()) {
        terms.push_back(std::move(term));
      }
    }
    queries.push_back(std::move(terms));
  }
  return queries;
}

void write_queries(const parallel::QueryBatch& queries, std::ostream& out) {
  for (const auto& q : queries) {
    for (std::size_t i = 0; i < q.size(); ++i) out << (i ? " " : "") << q[i];
    out << '\n';
  }
}

double student_t_975(std::uint64_t degrees_of_freedom) {
  if (degrees_of_freedom == 0) throw InvariantViolation("student t: zero degrees of freedom");
  const boost::math::students_t dist(static_cast<double>(degrees_of_freedom));
  return boost::math::quantile(dist, 0.975);
}

MeanCi mean_ci(std::span<const double> samples) {
  MeanCi out;
  if (samples.empty()) return out;
  const double n = static_cast<double>(samples.size());
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() < 2) return out;
  double ss = 0.0;
  for (double s : samples) ss += (s - out.mean) * (s - out.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  out.half_width = student_t_975(samples.size() - 1) * sd / std::sqrt(n);
  return out;
}

LayoutConfig parse_layout(const std::string& text) {
  if (text == "COMPACT" || text == "compact") return {"COMPACT", 0, true};
  const auto m = parse_cap(text);
  return {cap_label(m), m, false};
}

std::vector<LayoutConfig> parse_layouts(const std::string& comma_separated) {
  std::vector<LayoutConfig> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const auto comma = comma_separated.find(',', start);
    const auto item = comma_separated.substr(start, comma - start);
    if (!item.empty()) out.push_back(parse_layout(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw InvariantViolation("no layouts given");
  return out;
}

std::string length_bucket(std::size_t terms) {
  return terms >= 5 ? "5+" : std::to_string(terms);
}

const LatencyRow* LatencyReport::find(const std::string& config,
                                      const std::string& bucket) const {
  for (const auto& row : rows) {
    if (row.config == config && row.bucket == bucket) return &row;
  }
  return nullptr;
}

LatencyReport run_latency_suite(std::span<const Index* const> indexes,
                                std::span<const LayoutConfig> layouts,
                                const parallel::QueryBatch& queries,
                                const LatencyOptions& options) {
  if (indexes.size() != layouts.size() || indexes.empty()) {
    throw InvariantViolation("latency suite: one index per layout required");
  }
  if (options.trials == 0) throw InvariantViolation("latency suite: trials must be >= 1");

  std::vector<QueryEngine> engines;
  engines.reserve(indexes.size());
  for (const Index* index : indexes) {
    if (options.mode == QueryMode::kWand) {
      engines.emplace_back(*index, parallel::prepare_upper_bounds(*index, Bm25Params{}));
    } else {
      engines.emplace_back(*index, std::vector<double>(index->lexicon().size(), 0.0));
    }
  }

  // Correctness gate, also the warmup pass.
  const auto reference = parallel::run_batch_serial(engines[0], queries, options.mode, options.k);
  for (std::size_t c = 1; c < engines.size(); ++c) {
    const auto got = parallel::run_batch_serial(engines[c], queries, options.mode, options.k);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (!results_match(reference[q], got[q])) {
        throw InvariantViolation("layout " + layouts[c].label + " disagrees with " +
                                 layouts[0].label + " on query " + std::to_string(q));
      }
    }
  }

  std::vector<std::string> buckets;
  std::vector<std::size_t> bucket_of(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto b = length_bucket(queries[q].size());
    auto it = std::find(buckets.begin(), buckets.end(), b);
    if (it == buckets.end()) it = buckets.insert(buckets.end(), b);
    bucket_of[q] = static_cast<std::size_t>(it - buckets.begin());
  }
  std::vector<std::size_t> order(buckets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return buckets[a] < buckets[b]; });
  std::vector<std::size_t> bucket_count(buckets.size(), 0);
  for (auto b : bucket_of) ++bucket_count[b];

  // [layout][trial]
  std::vector<std::vector<double>> batch_ms(engines.size());
  // [layout][bucket][trial]
  std::vector<std::vector<std::vector<double>>> bucket_ms(
      engines.size(), std::vector<std::vector<double>>(buckets.size()));
  std::size_t sink = 0;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    for (std::size_t i = 0; i < engines.size(); ++i) {
      const std::size_t c = (i + trial) % engines.size();
      std::vector<double> per_bucket(buckets.size(), 0.0);
      const auto batch_start = Clock::now();
      for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto start = Clock::now();
        sink += engines[c].run(queries[q], options.mode, options.k).count;
        per_bucket[bucket_of[q]] += seconds_since(start);
      }
      const double total = seconds_since(batch_start);
      const double n = static_cast<double>(std::max<std::size_t>(1, queries.size()));
      batch_ms[c].push_back(1e3 * total / n);
      for (std::size_t b = 0; b < buckets.size(); ++b) {
        bucket_ms[c][b].push_back(1e3 * per_bucket[b] / static_cast<double>(bucket_count[b]));
      }
    }
  }
  // Keeps the result counts observable so the timed calls cannot be elided.
  volatile std::size_t keep = sink;
  (void)keep;

  LatencyReport report;
  for (std::size_t c = 0; c < engines.size(); ++c) {
    auto row = [&](const std::string& bucket, const std::vector<double>& samples) {
      const auto stats = mean_ci(samples);
      report.rows.push_back({layouts[c].label, options.mode, bucket, stats.mean,
                             stats.half_width, samples.size(), samples});
    };
    row("all", batch_ms[c]);
    for (auto b : order) row(buckets[b], bucket_ms[c][b]);
  }
  return report;
}

LatencyReport run_latency_suite(const Corpus& corpus, const parallel::QueryBatch& queries,
                                std::span<const LayoutConfig> layouts,
                                const LatencyOptions& options) {
  std::vector<Index> built;
  built.reserve(layouts.size());
  std::optional<Index> baseline;
  for (const auto& layout : layouts) {
    Config config = options.base;
    if (layout.compact) {
      if (!baseline) {
        config.cap_exponent = 0;
        baseline.emplace(build_index(corpus, config, options.pool));
      }
      built.push_back(parallel::compact_index(*baseline, options.pool));
    } else {
      config.cap_exponent = layout.cap_exponent;
      built.push_back(build_index(corpus, config, options.pool));
    }
  }
  baseline.reset();
  std::vector<const Index*> ptrs;
  for (const auto& index : built) ptrs.push_back(&index);
  return run_latency_suite(ptrs, layouts, queries, options);
}

std::vector<IndexingRow> run_indexing_suite(const Corpus& corpus,
                                            std::span<const std::uint32_t> cap_exponents,
                                            const Config& base, std::size_t trials,
                                            PoolOptions pool) {
  if (trials == 0) throw InvariantViolation("indexing suite: trials must be >= 1");
  std::vector<IndexingRow> rows;
  for (auto m : cap_exponents) {
    Config config = base;
    config.cap_exponent = m;
    IndexingRow row;
    row.config = cap_label(m);
    row.documents = corpus.size();
    for (std::size_t t = 0; t < trials; ++t) {
      const auto start = Clock::now();
      auto index = build_index(corpus, config, pool);
      row.trial_s.push_back(seconds_since(start));
    }
    const auto stats = mean_ci(row.trial_s);
    row.trials = trials;
    row.mean_s = stats.mean;
    row.ci_s = stats.half_width;
    row.docs_per_sec = stats.mean > 0 ? static_cast<double>(corpus.size()) / stats.mean : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

MemoryReport stats_report(const Index& index) {
  MemoryReport report;
  const auto& build = index.build_stats();
  report.config = cap_label(index.config().cap_exponent);
  report.peak_buffers = build.peak_buffers;
  report.pool_bytes = index.pool().end();
  report.pool_allocated_bytes = index.pool().allocated_bytes();
  report.vocabulary_seen = build.vocabulary_seen;
  report.retained_terms = index.lexicon().size();
  report.discarded_terms = build.discarded_terms;
  report.segments = index.pool().stats().segments;
  const double retained = static_cast<double>(report.retained_terms);
  for (auto count : build.buffer_length_histogram) {
    report.buffer_length_fractions.push_back(retained > 0 ? static_cast<double>(count) / retained
                                                          : 0.0);
  }
  return report;
}

void write_latency_csv(const LatencyReport& report, std::ostream& out) {
  out << "config,mode,query_len_bucket,mean_ms,ci_ms,trials\n";
  out << std::setprecision(6);
  for (const auto& row : report.rows) {
    out << row.config << ',' << mode_name(row.mode) << ',' << row.bucket << ',' << row.mean_ms
        << ',';
    write_optional(out, row.ci_ms);
    out << ',' << row.trials << '\n';
  }
}

void write_indexing_csv(std::span<const IndexingRow> rows, std::ostream& out) {
  out << "config,documents,trials,mean_s,ci_s,docs_per_sec\n";
  out << std::setprecision(6);
  for (const auto& row : rows) {
    out << row.config << ',' << row.documents << ',' << row.trials << ',' << row.mean_s << ',';
    write_optional(out, row.ci_s);
    out << ',' << row.docs_per_sec << '\n';
  }
}

void write_memory_csv(std::span<const MemoryReport> reports, std::ostream& out) {
  out << "config,metric,value\n";
  out << std::setprecision(6);
  for (const auto& r : reports) {
    const auto line = [&](const std::string& metric, auto value) {
      out << r.config << ',' << metric << ',' << value << '\n';
    };
    line("peak_docid_bytes", r.peak_buffers.docid_bytes);
    line("peak_tf_bytes", r.peak_buffers.tf_bytes);
    line("peak_position_bytes", r.peak_buffers.position_bytes);
    line("peak_total_bytes", r.peak_buffers.total());
    line("pool_bytes", r.pool_bytes);
    line("pool_allocated_bytes", r.pool_allocated_bytes);
    line("segments", r.segments);
    line("vocabulary_seen", r.vocabulary_seen);
    line("retained_terms", r.retained_terms);
    line("discarded_terms", r.discarded_terms);
    for (std::size_t j = 0; j < r.buffer_length_fractions.size(); ++j) {
      line("buffer_len_" + cap_label(static_cast<std::uint32_t>(j)) + "_fraction",
           r.buffer_length_fractions[j]);
    }
  }
}

void write_memory_text(const MemoryReport& r, std::ostream& out) {
  const auto mib = [](std::uint64_t b) { return static_cast<double>(b) / (1024.0 * 1024.0); };
  out << std::fixed << std::setprecision(2);
  out << "config              " << r.config << '\n'
      << "peak buffer memory  " << mib(r.peak_buffers.total()) << " MiB"
      << " (docids " << mib(r.peak_buffers.docid_bytes) << ", tfs "
      << mib(r.peak_buffers.tf_bytes) << ", positions " << mib(r.peak_buffers.position_bytes)
      << ")\n"
      << "segment pool        " << mib(r.pool_bytes) << " MiB in " << r.segments
      << " segments\n"
      << "vocabulary          " << r.vocabulary_seen << " seen, " << r.retained_terms
      << " retained, " << r.discarded_terms << " discarded\n"
      << "buffer length       ";
  for (std::size_t j = 0; j < r.buffer_length_fractions.size(); ++j) {
    out << (j ? "  " : "") << cap_label(static_cast<std::uint32_t>(j)) << ' '
        << 100.0 * r.buffer_length_fractions[j] << '%';
  }
  out << '\n';
  out.unsetf(std::ios::fixed);
}

}  // namespace incidx::bench
