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

// incidx: build, query, compact and benchmark in-memory inverted indexes.
//
// Exit codes: 0 ok, 1 usage, 2 bad input or unreadable file, 3 pool budget
// exhausted, 4 corrupt index file, 5 internal error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "incidx/bench.hpp"
#include "incidx/config.hpp"
#include "incidx/error.hpp"
#include "incidx/index_io.hpp"
#include "incidx/indexer.hpp"
#include "incidx/parallel.hpp"
#include "incidx/query.hpp"

namespace {

using namespace incidx;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return 1;
    case ErrorKind::kInputFormat:
    case ErrorKind::kInputOrder:
    case ErrorKind::kIo:
      return 2;
    case ErrorKind::kCapacity:
      return 3;
    case ErrorKind::kCorruptSegment:
    case ErrorKind::kFileFormat:
      return 4;
    default:
      return 5;
  }
}

// Flags shared by everything that builds an index.
struct BuildFlags {
  std::uint32_t block_size = 128;
  std::string cap = "32b";
  std::uint32_t df_threshold = 10;
  bool positional = true;
  std::uint64_t memory_budget = 0;
  std::uint64_t pool_block_mib = 256;

  void add_to(CLI::App* app) {
    app->add_option("--block-size", block_size, "postings per segment")->capture_default_str();
    app->add_option("--cap", cap, "buffer cap, 1b..128b or exponent 0..7")->capture_default_str();
    app->add_option("--df-threshold", df_threshold, "minimum df to keep a term")
        ->capture_default_str();
    app->add_option("--positional", positional, "store term positions (true|false)")
        ->capture_default_str();
    app->add_option("--memory-budget", memory_budget, "pool byte budget, 0 for none");
    app->add_option("--pool-block-mib", pool_block_mib, "pool allocation block in MiB")
        ->capture_default_str();
  }

  // Range errors here are the caller's fault, not ours.
  Config config() const {
    try {
      Config c;
      c.block_size = block_size;
      c.cap_exponent = parse_cap(cap);
      c.df_threshold = df_threshold;
      c.positional = positional;
      c.validate();
      if (c.df_threshold > c.block_size) {
        throw InvariantViolation("--df-threshold must not exceed --block-size");
      }
      return c;
    } catch (const InvariantViolation& e) {
      throw UsageError(e.what());
    }
  }

  PoolOptions pool() const {
    try {
      PoolOptions p;
      p.block_bytes = pool_block_mib << 20;
      if (memory_budget) p.memory_budget = memory_budget;
      p.validate();
      return p;
    } catch (const InvariantViolation& e) {
      throw UsageError(e.what());
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

QueryMode parse_mode(const std::string& s) {
  if (s == "svs") return QueryMode::kSvs;
  if (s == "wand") return QueryMode::kWand;
  throw UsageError("--mode must be svs or wand");
}

int cmd_index(const BuildFlags& flags, const std::string& input, const std::string& output,
              bool skip_bad, std::uint64_t progress) {
  const auto config = flags.config();
  const auto pool = flags.pool();
  std::ifstream in(input, std::ios::binary);
  if (!in) throw IoError("cannot open " + input);

  const auto start = std::chrono::steady_clock::now();
  Indexer indexer(config, pool);
  IngestOptions opt;
  opt.skip_bad = skip_bad;
  opt.progress_interval = progress;
  opt.on_progress = [](const IngestProgress& p) {
    std::cerr << p.documents << " docs, " << std::fixed << std::setprecision(0)
              << p.docs_per_second << " docs/s, pool " << p.pool_bytes << " bytes\n";
  };
  const auto summary = ingest_stream(in, indexer, opt);
  for (const auto& e : summary.errors) std::cerr << "skipped: " << e << '\n';
  const auto index = indexer.finalize();
  save_index(index, output);

  std::cout << "documents  " << summary.documents << '\n'
            << "skipped    " << summary.bad_lines << '\n'
            << "vocabulary " << index.lexicon().size() << " retained of "
            << index.build_stats().vocabulary_seen << '\n'
            << "pool bytes " << index.pool().end() << '\n'
            << "wall time  " << std::fixed << std::setprecision(3) << seconds_since(start)
            << " s\n";
  return 0;
}

int cmd_query(const std::string& index_path, const std::string& queries_path,
              const std::string& mode_text, std::size_t k, int threads) {
  const auto mode = parse_mode(mode_text);
  if (mode == QueryMode::kWand && k == 0) throw UsageError("--k must be at least 1");
  if (threads < 1) throw UsageError("--threads must be at least 1");
  const auto index = load_index(index_path);
  const auto queries = read_queries_file(queries_path);
  const QueryEngine engine(index, parallel::prepare_upper_bounds(index, {}, threads));
  const auto results = threads == 1 ? parallel::run_batch_serial(engine, queries, mode, k)
                                    : parallel::run_batch(engine, queries, mode, k, threads);

  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  for (std::size_t q = 0; q < results.size(); ++q) {
    const auto& r = results[q];
    out << q << '\t' << r.count << '\t';
    if (mode == QueryMode::kSvs) {
      for (std::size_t i = 0; i < r.docids.size(); ++i) out << (i ? " " : "") << r.docids[i];
    } else {
      for (std::size_t i = 0; i < r.hits.size(); ++i) {
        out << (i ? " " : "") << r.hits[i].docid << ':' << r.hits[i].score;
      }
    }
    out << '\n';
  }
  std::cout << out.str();
  return 0;
}

int cmd_stats(const std::string& index_path, const std::string& csv) {
  const auto index = load_index(index_path);
  const auto report = bench::stats_report(index);
  bench::write_memory_text(report, std::cout);
  if (!csv.empty()) {
    auto out = open_out(csv);
    const std::vector<bench::MemoryReport> reports{report};
    bench::write_memory_csv(reports, out);
  }
  return 0;
}

int cmd_compact(const std::string& index_path, const std::string& output, int threads) {
  if (threads < 1) throw UsageError("--threads must be at least 1");
  const auto index = load_index(index_path);
  const auto compacted = threads == 1
                             ? compact_index(index)
                             : parallel::compact_index(index, index.pool().options(), threads);
  save_index(compacted, output);
  std::cout << "pool bytes " << index.pool().end() << " -> " << compacted.pool().end() << '\n';
  return 0;
}

struct SynthFlags {
  bench::SynthParams corpus;
  std::string output;
  bench::QuerySynthParams queries;
  std::string query_output;
};

int cmd_synth(const SynthFlags& f) {
  if (f.output.empty() && f.query_output.empty()) {
    throw UsageError("nothing to do: give --output and/or --query-output");
  }
  try {
    if (!f.output.empty()) {
      auto out = open_out(f.output);
      bench::synth_corpus(f.corpus, out);
    }
    if (!f.query_output.empty()) {
      auto out = open_out(f.query_output);
      bench::write_queries(bench::synth_queries(f.queries), out);
    }
  } catch (const InvariantViolation& e) {
    throw UsageError(e.what());
  }
  return 0;
}

struct BenchFlags {
  std::string input;
  std::string queries;
  std::uint64_t query_count = 1000;
  std::uint64_t seed = 7;
  std::string layouts = "1b,32b,COMPACT";
  std::string mode = "svs";
  std::size_t k = 1000;
  std::size_t trials = 5;
  std::string out_dir = ".";
  std::vector<std::string> suites{"latency", "indexing", "memory"};
};

int cmd_bench(const BuildFlags& build, const BenchFlags& f) {
  Config base = build.config();
  const auto pool = build.pool();
  std::vector<bench::LayoutConfig> layouts;
  try {
    layouts = bench::parse_layouts(f.layouts);
  } catch (const InvariantViolation& e) {
    throw UsageError(e.what());
  }
  if (f.trials == 0) throw UsageError("--trials must be at least 1");

  std::ifstream in(f.input, std::ios::binary);
  if (!in) throw IoError("cannot open " + f.input);
  const auto corpus = Corpus::read(in);
  std::filesystem::create_directories(f.out_dir);
  const auto path = [&](const char* name) { return (std::filesystem::path(f.out_dir) / name).string(); };
  const auto wants = [&](const std::string& s) {
    return std::find(f.suites.begin(), f.suites.end(), s) != f.suites.end();
  };

  if (wants("latency")) {
    parallel::QueryBatch queries;
    if (!f.queries.empty()) {
      queries = read_queries_file(f.queries);
    } else {
      bench::QuerySynthParams qp;
      qp.count = f.query_count;
      qp.seed = f.seed;
      queries = bench::synth_queries(qp);
    }
    bench::LatencyOptions opt;
    opt.mode = parse_mode(f.mode);
    opt.k = f.k;
    opt.trials = f.trials;
    opt.base = base;
    opt.pool = pool;
    const auto report = bench::run_latency_suite(corpus, queries, layouts, opt);
    auto out = open_out(path("latency.csv"));
    bench::write_latency_csv(report, out);
    for (const auto& row : report.rows) {
      if (row.bucket != "all") continue;
      std::cout << "latency " << row.config << ' ' << std::fixed << std::setprecision(4)
                << row.mean_ms << " ms\n";
    }
  }

  std::vector<std::uint32_t> caps;
  for (const auto& l : layouts) {
    if (!l.compact) caps.push_back(l.cap_exponent);
  }
  if (wants("indexing")) {
    const auto rows = bench::run_indexing_suite(corpus, caps, base, f.trials, pool);
    auto out = open_out(path("indexing.csv"));
    bench::write_indexing_csv(rows, out);
    for (const auto& row : rows) {
      std::cout << "indexing " << row.config << ' ' << std::fixed << std::setprecision(0)
                << row.docs_per_sec << " docs/s\n";
    }
  }
  if (wants("memory")) {
    std::vector<bench::MemoryReport> reports;
    for (auto m : caps) {
      Config c = base;
      c.cap_exponent = m;
      reports.push_back(bench::stats_report(build_index(corpus, c, pool)));
    }
    auto out = open_out(path("memory.csv"));
    bench::write_memory_csv(reports, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-memory incremental inverted indexer"};
  app.require_subcommand(1);

  BuildFlags build;
  std::string input, output, index_path, queries_path, mode = "svs", csv;
  bool skip_bad = false;
  std::uint64_t progress = 0;
  std::size_t k = 1000;
  int threads = 1;

  auto* index_cmd = app.add_subcommand("index", "index a corpus file and save the index");
  index_cmd->add_option("--input", input, "corpus, one 'docid<TAB>tokens' per line")->required();
  index_cmd->add_option("--output", output, "index file to write")->required();
  index_cmd->add_flag("--skip-bad", skip_bad, "skip malformed or out-of-order lines");
  index_cmd->add_option("--progress", progress, "report every N documents on stderr");
  build.add_to(index_cmd);

  auto* query_cmd = app.add_subcommand("query", "run a query file against an index");
  query_cmd->add_option("--index", index_path)->required();
  query_cmd->add_option("--queries", queries_path, "one query per line")->required();
  query_cmd->add_option("--mode", mode, "svs or wand")->capture_default_str();
  query_cmd->add_option("--k", k, "hits per WAND query")->capture_default_str();
  query_cmd->add_option("--threads", threads, "query threads")->capture_default_str();

  auto* stats_cmd = app.add_subcommand("stats", "print build and memory statistics");
  stats_cmd->add_option("--index", index_path)->required();
  stats_cmd->add_option("--csv", csv, "also write memory.csv rows here");

  auto* compact_cmd = app.add_subcommand("compact", "rewrite an index with contiguous chains");
  compact_cmd->add_option("--index", index_path)->required();
  compact_cmd->add_option("--output", output)->required();
  compact_cmd->add_option("--threads", threads)->capture_default_str();

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic Zipfian corpus and queries");
  synth_cmd->add_option("--docs", synth.corpus.doc_count)->capture_default_str();
  synth_cmd->add_option("--vocab", synth.corpus.vocab_size)->capture_default_str();
  synth_cmd->add_option("--zipf", synth.corpus.zipf_s)->capture_default_str();
  synth_cmd->add_option("--avg-len", synth.corpus.avg_len)->capture_default_str();
  synth_cmd->add_option("--seed", synth.corpus.seed)->capture_default_str();
  synth_cmd->add_option("--output", synth.output, "corpus file");
  synth_cmd->add_option("--queries", synth.queries.count, "number of queries")
      ->capture_default_str();
  synth_cmd->add_option("--query-vocab", synth.queries.vocab_size, "draw from the top N ranks")
      ->capture_default_str();
  synth_cmd->add_option("--query-seed", synth.queries.seed)->capture_default_str();
  synth_cmd->add_option("--query-output", synth.query_output, "query file");

  BenchFlags bflags;
  auto* bench_cmd = app.add_subcommand("bench", "latency, indexing and memory suites to CSV");
  bench_cmd->add_option("--input", bflags.input, "corpus file")->required();
  bench_cmd->add_option("--queries", bflags.queries, "query file (default: synthesized)");
  bench_cmd->add_option("--query-count", bflags.query_count)->capture_default_str();
  bench_cmd->add_option("--seed", bflags.seed, "seed for synthesized queries")
      ->capture_default_str();
  bench_cmd->add_option("--configs", bflags.layouts, "comma separated, e.g. 1b,32b,COMPACT")
      ->capture_default_str();
  bench_cmd->add_option("--mode", bflags.mode)->capture_default_str();
  bench_cmd->add_option("--k", bflags.k)->capture_default_str();
  bench_cmd->add_option("--trials", bflags.trials)->capture_default_str();
  bench_cmd->add_option("--out-dir", bflags.out_dir)->capture_default_str();
  bench_cmd->add_option("--suites", bflags.suites, "latency indexing memory")
      ->delimiter(',')
      ->check(CLI::IsMember({"latency", "indexing", "memory"}));
  build.add_to(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*index_cmd) return cmd_index(build, input, output, skip_bad, progress);
    if (*query_cmd) return cmd_query(index_path, queries_path, mode, k, threads);
    if (*stats_cmd) return cmd_stats(index_path, csv);
    if (*compact_cmd) return cmd_compact(index_path, output, threads);
    if (*synth_cmd) return cmd_synth(synth);
    if (*bench_cmd) return cmd_bench(build, bflags);
  } catch (const Error& e) {
    std::cerr << "incidx: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "incidx: " << e.what() << '\n';
    return 5;
  }
  return 1;
}
