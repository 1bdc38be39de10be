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

// End-to-end acceptance run. One line per criterion:
//
//   criterion N  name  PASS|FAIL|WARN  (seconds)  detail
//
// Exit status is nonzero when any criterion fails. WARN is reserved for the
// latency trend, which depends on the machine. --only N runs one criterion.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "incidx/bench.hpp"
#include "incidx/codec.hpp"
#include "incidx/error.hpp"
#include "incidx/index_io.hpp"
#include "incidx/indexer.hpp"
#include "incidx/parallel.hpp"
#include "incidx/query.hpp"
#include "oracle.hpp"

namespace {

using namespace incidx;
using testing::TestDoc;

enum class Status { kPass, kFail, kWarn };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

class Failed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failed(what);
}

std::string synth_text(std::uint64_t docs, std::uint64_t vocab, double s, double avg_len,
                       std::uint64_t seed) {
  bench::SynthParams p;
  p.doc_count = docs;
  p.vocab_size = vocab;
  p.zipf_s = s;
  p.avg_len = avg_len;
  p.seed = seed;
  std::ostringstream out;
  bench::synth_corpus(p, out);
  return out.str();
}

Corpus to_corpus(const std::string& text) {
  std::istringstream in(text);
  return Corpus::read(in);
}

std::vector<TestDoc> to_docs(const std::string& text) {
  std::vector<TestDoc> docs;
  std::istringstream in(text);
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    const auto parsed = parse_corpus_line(line, ++n);
    docs.push_back({parsed.docid, {parsed.tokens.begin(), parsed.tokens.end()}});
  }
  return docs;
}

PoolOptions small_pool() {
  PoolOptions p;
  p.block_bytes = 4 << 20;
  return p;
}

Config make_config(std::uint32_t m, bool positional = true) {
  Config c;
  c.cap_exponent = m;
  c.positional = positional;
  return c;
}

// ---------------------------------------------------------------------------

Outcome codec_exactness() {
  std::mt19937_64 rng(20260101);
  std::vector<std::uint32_t> decoded;
  std::size_t exception_blocks = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + rng() % 128;
    std::vector<std::uint32_t> values(n);
    const auto kind = i % 4;
    // full range, small values with a random share of huge outliers, a
    // single outlier, or constant extremes
    const double outliers = bench::uniform01(rng) * 0.6;
    const std::uint32_t small_bits = 1 + rng() % 12;
    for (auto& v : values) {
      const auto r = static_cast<std::uint32_t>(rng());
      switch (kind) {
        case 0:
          v = r;
          break;
        case 1:
          v = bench::uniform01(rng) < outliers ? r | 0x80000000u : r & ((1u << small_bits) - 1);
          break;
        case 2:
          v = r & 7;
          break;
        default:
          v = (i / 4) % 2 ? 0xFFFFFFFFu : 0;
      }
    }
    if (kind == 2) values[rng() % n] = 0xFFFFFFFFu;
    const auto enc = codec::encode_block(values);
    if (codec::read_header(enc.payload).exception_count > 0) ++exception_blocks;
    codec::decode_block_into(enc.payload, 128, decoded);
    require(decoded == values, "block " + std::to_string(i) + " did not round-trip");
  }
  const codec::PerDocPositions example{{1, 5, 9}, {3, 16}};
  const auto gaps = codec::position_gap_encode(example);
  require(gaps == std::vector<std::uint32_t>{1, 4, 4, 3, 13}, "position example encodes wrong");
  const std::vector<std::uint32_t> tfs{3, 2};
  require(codec::position_gap_decode(gaps, tfs) == example, "position example decodes wrong");
  return {Status::kPass, "10000 blocks exact, " + std::to_string(exception_blocks) +
                             " with exceptions; position example exact"};
}

// The 50 corpora shared by criteria 2 and 8.
std::string small_corpus(int i) {
  return synth_text(100 + 98 * static_cast<std::uint64_t>(i), 2000, 1.2, 50, 1000 + i);
}

Outcome oracle_equivalence() {
  std::size_t builds = 0, terms_checked = 0;
  for (int i = 0; i < 50; ++i) {
    const auto text = small_corpus(i);
    const auto docs = to_docs(text);
    const auto corpus = to_corpus(text);
    const auto naive = testing::naive_index(docs);
    const auto retained = naive.retained(10);
    for (std::uint32_t m : {0u, 2u, 5u, 7u}) {
      for (bool positional : {true, false}) {
        const auto index = build_index(corpus, make_config(m, positional), small_pool());
        ++builds;
        const std::string where = "corpus " + std::to_string(i) + " m=" + std::to_string(m) +
                                  (positional ? " positional" : " plain");
        require(index.lexicon().size() == retained.size(), where + ": vocabulary differs");
        for (const auto& term : retained) {
          const auto id = index.lexicon().lookup(term);
          require(id.has_value(), where + ": missing " + term);
          const auto got = index.postings(*id);
          const auto& want = naive.postings().at(term);
          require(got.docids.size() == want.size(), where + ": df of " + term);
          for (std::size_t p = 0; p < want.size(); ++p) {
            require(got.docids[p] == want[p].docid && got.tfs[p] == want[p].positions.size(),
                    where + ": posting of " + term);
            if (positional) require(got.positions[p] == want[p].positions, where + ": positions");
          }
          require(positional || got.positions.empty(), where + ": unexpected positions");
          ++terms_checked;
        }
      }
    }
  }
  return {Status::kPass, std::to_string(builds) + " builds, " + std::to_string(terms_checked) +
                             " term lists equal to the naive map"};
}

bool same_hits(const std::vector<ScoredHit>& a, const std::vector<ScoredHit>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].docid != b[i].docid || std::abs(a[i].score - b[i].score) > 1e-9) return false;
  }
  return true;
}

Outcome layout_independence() {
  const auto corpus = to_corpus(synth_text(100000, 10000, 1.2, 50, 42));
  bench::QuerySynthParams qp;
  qp.count = 1000;
  qp.seed = 43;
  const auto queries = bench::synth_queries(qp);

  std::vector<Index> indexes;
  std::vector<std::string> labels;
  for (std::uint32_t m : {0u, 5u, 7u}) {
    indexes.push_back(build_index(corpus, make_config(m)));
    labels.push_back(cap_label(m));
  }
  indexes.push_back(parallel::compact_index(indexes[0], indexes[0].pool().options()));
  labels.push_back("COMPACT");

  std::vector<std::vector<QueryResult>> svs, wand;
  for (const auto& index : indexes) {
    const QueryEngine engine(index, prepare_upper_bounds(index));
    svs.push_back(parallel::run_batch_serial(engine, queries, QueryMode::kSvs, 0));
    wand.push_back(parallel::run_batch_serial(engine, queries, QueryMode::kWand, 1000));
  }
  std::size_t nonempty = 0;
  for (std::size_t c = 1; c < indexes.size(); ++c) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      require(svs[c][q].docids == svs[0][q].docids,
              labels[c] + " SvS differs on query " + std::to_string(q));
      require(same_hits(wand[c][q].hits, wand[0][q].hits),
              labels[c] + " WAND differs on query " + std::to_string(q));
    }
  }
  for (const auto& r : svs[0]) nonempty += r.count > 0;
  return {Status::kPass, "1000 queries identical across 1b,32b,128b,COMPACT (" +
                             std::to_string(nonempty) + " non-empty intersections)"};
}

Outcome wand_safety() {
  std::mt19937_64 rng(77);
  std::size_t checks = 0;
  const std::uint64_t sizes[] = {2000, 1500, 1000, 500, 200};
  for (int c = 0; c < 5; ++c) {
    const auto text = synth_text(sizes[c], 2000, 1.2, 40, 500 + c);
    const auto docs = to_docs(text);
    const auto naive = testing::naive_index(docs);
    const auto retained = naive.retained(10);
    const auto index = build_index(to_corpus(text), make_config(static_cast<std::uint32_t>(c)),
                                   small_pool());
    const QueryEngine engine(index, prepare_upper_bounds(index));
    std::vector<std::string> vocab;
    for (const auto& [term, list] : naive.postings()) vocab.push_back(term);
    for (int q = 0; q < 100; ++q) {
      const auto query = testing::random_query(rng, vocab, 1, 5);
      for (std::size_t k : {10u, 100u, 1000u}) {
        const auto got = engine.wand(query, k);
        const auto want = testing::exhaustive_topk(naive, retained, query, k);
        require(got.size() == want.size(), "hit count differs");
        for (std::size_t i = 0; i < got.size(); ++i) {
          require(got[i].docid == want[i].docid && std::abs(got[i].score - want[i].score) <= 1e-9,
                  "corpus " + std::to_string(c) + " query " + std::to_string(q) + " k=" +
                      std::to_string(k) + " rank " + std::to_string(i));
        }
        ++checks;
      }
    }
  }
  return {Status::kPass, std::to_string(checks) + " top-k lists equal to exhaustive scoring"};
}

Outcome growth_schedule() {
  const auto corpus = to_corpus(synth_text(20000, 5000, 1.2, 50, 9));
  std::size_t flushes = 0, segments = 0;
  for (std::uint32_t m = 0; m <= kMaxCapExponent; ++m) {
    const Config config = make_config(m);
    Indexer indexer(config, small_pool(), {true});
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      indexer.index_document(corpus.docid(i), corpus.tokens(i));
    }
    const auto index = indexer.finalize();
    const auto& pool = index.pool();
    std::vector<std::uint32_t> next_ordinal(indexer.dictionary().size(), 0);
    for (const auto& rec : indexer.flush_log()) {
      const auto where = "m=" + std::to_string(m) + " term " + std::to_string(rec.term) +
                         " flush " + std::to_string(rec.ordinal);
      require(rec.ordinal == next_ordinal[rec.term]++, where + ": ordinal out of sequence");
      require(rec.capacity == grow_schedule(rec.ordinal, m, config.block_size),
              where + ": capacity " + std::to_string(rec.capacity));
      if (!rec.final) {
        require(rec.postings == rec.capacity, where + ": not flushed at capacity");
        require(rec.segments.size() == rec.capacity / config.block_size,
                where + ": segment count");
      }
      for (std::size_t s = 0; s < rec.segments.size(); ++s) {
        const auto view = pool.view(rec.segments[s]);
        const bool last = s + 1 == rec.segments.size();
        require(last || view.posting_count == config.block_size, where + ": short segment");
        if (last) continue;
        require(view.next == rec.segments[s + 1], where + ": chain skips");
        const auto gap = rec.segments[s + 1] - rec.segments[s] - view.byte_length;
        require(gap < kSegmentAlignment, where + ": foreign bytes between segments");
      }
      ++flushes;
      segments += rec.segments.size();
    }
  }
  return {Status::kPass, std::to_string(flushes) + " flushes, " + std::to_string(segments) +
                             " segments audited over m=0..7"};
}

Outcome memory_monotonicity() {
  const auto corpus = to_corpus(synth_text(100000, 10000, 1.2, 50, 11));
  BufferMemory prev;
  std::ostringstream detail;
  detail << "peak MiB";
  for (std::uint32_t m = 0; m <= kMaxCapExponent; ++m) {
    const auto report = bench::stats_report(build_index(corpus, make_config(m)));
    const auto& peak = report.peak_buffers;
    require(peak.docid_bytes >= prev.docid_bytes && peak.tf_bytes >= prev.tf_bytes &&
                peak.position_bytes >= prev.position_bytes,
            "peak buffer bytes drop at m=" + std::to_string(m));
    double sum = 0.0;
    for (double f : report.buffer_length_fractions) sum += f;
    require(std::abs(sum - 1.0) < 1e-9, "fractions sum to " + std::to_string(sum));
    detail << ' ' << cap_label(m) << '=' << std::fixed << std::setprecision(1)
           << static_cast<double>(peak.total()) / (1 << 20);
    prev = peak;
  }
  return {Status::kPass, detail.str()};
}

Outcome latency_trend() {
  const auto corpus = to_corpus(synth_text(1000000, 50000, 1.2, 30, 2026));
  bench::QuerySynthParams qp;
  qp.count = 1000;
  qp.seed = 5;
  const auto queries = bench::synth_queries(qp);
  const auto layouts = bench::parse_layouts("1b,32b,COMPACT");
  bench::LatencyOptions opt;
  opt.mode = QueryMode::kSvs;
  opt.trials = 3;
  // throws if any layout disagrees on the batch
  const auto report = bench::run_latency_suite(corpus, queries, layouts, opt);
  const auto* one = report.find("1b");
  const auto* cap = report.find("32b");
  const auto* compact = report.find("COMPACT");
  int separated = 0;
  for (std::size_t t = 0; t < 3; ++t) {
    separated += compact->trial_ms[t] <= 0.97 * one->trial_ms[t];
  }
  std::ostringstream detail;
  detail << std::fixed << std::setprecision(4) << "SvS ms/query 1b=" << one->mean_ms
         << " 32b=" << cap->mean_ms << " COMPACT=" << compact->mean_ms << ", "
         << separated << "/3 trials with >=3% separation";
  const bool ordered = compact->mean_ms <= cap->mean_ms && cap->mean_ms <= one->mean_ms * 1.02;
  if (ordered && separated >= 2) return {Status::kPass, detail.str()};
  return {Status::kWarn, detail.str() + (ordered ? "" : ", ordering not observed")};
}

std::string stats_text(const Index& index) {
  std::ostringstream out;
  const std::vector<bench::MemoryReport> r{bench::stats_report(index)};
  bench::write_memory_csv(r, out);
  bench::write_memory_text(r[0], out);
  return out.str();
}

Outcome persistence() {
  const auto path = std::filesystem::temp_directory_path() /
                    ("incidx_acceptance_" + std::to_string(::getpid()) + ".idx");
  std::size_t queries_checked = 0;
  for (int i = 0; i < 50; ++i) {
    const auto text = small_corpus(i);
    const auto index = build_index(to_corpus(text), make_config(static_cast<std::uint32_t>(i % 8),
                                                                i % 2 == 0),
                                   small_pool());
    save_index(index, path.string());
    const auto loaded = load_index(path.string());
    require(stats_text(loaded) == stats_text(index), "stats differ on corpus " + std::to_string(i));
    require(loaded.collection() == index.collection(), "collection stats differ");

    bench::QuerySynthParams qp;
    qp.count = 100;
    qp.vocab_size = 1000;
    qp.seed = static_cast<std::uint64_t>(i);
    const auto queries = bench::synth_queries(qp);
    const QueryEngine a(index, prepare_upper_bounds(index));
    const QueryEngine b(loaded, prepare_upper_bounds(loaded));
    for (auto mode : {QueryMode::kSvs, QueryMode::kWand}) {
      require(parallel::run_batch_serial(a, queries, mode, 100) ==
                  parallel::run_batch_serial(b, queries, mode, 100),
              "query results differ after reload on corpus " + std::to_string(i));
      queries_checked += queries.size();
    }
  }
  std::filesystem::remove(path);
  return {Status::kPass, "50 indexes reloaded, " + std::to_string(queries_checked) +
                             " query results identical, stats identical"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 1;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "codec exactness", 10, codec_exactness},
      {2, "oracle index equivalence", 120, oracle_equivalence},
      {3, "layout independence", 300, layout_independence},
      {4, "WAND safety", 120, wand_safety},
      {5, "buffer growth schedule", 300, growth_schedule},
      {6, "memory monotonicity", 600, memory_monotonicity},
      {7, "latency trend", 1200, latency_trend},
      {8, "persistence round-trip", 300, persistence},
  };

  bool failed = false;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {Status::kFail, e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s && outcome.status != Status::kFail) {
      // only the timing criterion is allowed to be slow on a slow machine
      outcome.status = c.id == 7 ? Status::kWarn : Status::kFail;
      outcome.detail += "; over the " + std::to_string(static_cast<int>(c.limit_s)) + " s limit";
    }
    const char* label = outcome.status == Status::kPass   ? "PASS"
                        : outcome.status == Status::kWarn ? "WARN"
                                                          : "FAIL";
    char head[128];
    std::snprintf(head, sizeof head, "criterion %d  %-26s %s  (%.1f s)  ", c.id, c.name, label,
                  secs);
    std::cout << head << outcome.detail << std::endl;
    failed |= outcome.status == Status::kFail;
  }
  return failed ? 1 : 0;
}
