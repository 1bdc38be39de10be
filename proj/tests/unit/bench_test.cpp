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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "incidx/error.hpp"
#include "oracle.hpp"

namespace incidx {
namespace {

using namespace incidx::bench;

std::string synth_text(const SynthParams& p) {
  std::ostringstream out;
  synth_corpus(p, out);
  return out.str();
}

Corpus synth(const SynthParams& p) {
  std::istringstream in(synth_text(p));
  return Corpus::read(in);
}

TEST(Synth, DeterministicAndWellFormed) {
  SynthParams p;
  p.doc_count = 500;
  p.vocab_size = 2000;
  p.avg_len = 20;
  p.seed = 3;
  const auto text = synth_text(p);
  EXPECT_EQ(text, synth_text(p));
  p.seed = 4;
  EXPECT_NE(text, synth_text(p));

  std::istringstream in(text);
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    const auto parsed = parse_corpus_line(line, n + 1);
    EXPECT_EQ(parsed.docid, n);
    EXPECT_GE(parsed.tokens.size(), 1u);
    EXPECT_LE(parsed.tokens.size(), 39u);
    ++n;
  }
  EXPECT_EQ(n, 500u);

  SynthParams bad;
  bad.vocab_size = 0;
  std::ostringstream sink;
  EXPECT_THROW(synth_corpus(bad, sink), InvariantViolation);
}

TEST(Synth, EmptyCorpus) {
  SynthParams p;
  p.doc_count = 0;
  EXPECT_TRUE(synth_text(p).empty());
}

// Least-squares slope of log(frequency) against log(rank).
double loglog_slope(const std::vector<double>& freq, std::size_t ranks) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < ranks; ++r) {
    if (freq[r] <= 0) continue;
    const double x = std::log(static_cast<double>(r + 1));
    const double y = std::log(freq[r]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

TEST(Synth, RankFrequencySlopeFollowsExponent) {
  for (double s : {1.0, 1.2}) {
    SynthParams p;
    p.doc_count = 20000;
    p.vocab_size = 10000;
    p.zipf_s = s;
    p.avg_len = 50;
    p.seed = 11;
    std::istringstream in(synth_text(p));
    std::map<std::string, double> counts;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
      for (auto t : parse_corpus_line(line, ++lineno).tokens) counts[std::string(t)] += 1;
    }
    std::vector<double> freq;
    for (const auto& [t, c] : counts) freq.push_back(c);
    std::sort(freq.rbegin(), freq.rend());
    // well-sampled head of the distribution
    const double slope = loglog_slope(freq, 1000);
    EXPECT_NEAR(slope, -s, 0.1 * s) << "s=" << s;
  }
}

TEST(Zipf, SamplerStaysInRange) {
  ZipfSampler z(50, 1.2);
  std::mt19937_64 rng(1);
  std::vector<int> hits(50);
  for (int i = 0; i < 20000; ++i) {
    const auto r = z(rng);
    ASSERT_LT(r, 50u);
    ++hits[r];
  }
  EXPECT_GT(hits[0], hits[1]);
  EXPECT_GT(hits[1], hits[10]);
  EXPECT_THROW(ZipfSampler(0, 1.0), InvariantViolation);
}

TEST(Queries, SynthesizedWithinLengthBounds) {
  QuerySynthParams p;
  p.count = 200;
  p.min_terms = 2;
  p.max_terms = 4;
  p.vocab_size = 100;
  const auto qs = synth_queries(p);
  ASSERT_EQ(qs.size(), 200u);
  for (const auto& q : qs) {
    EXPECT_GE(q.size(), 2u);
    EXPECT_LE(q.size(), 4u);
  }
  EXPECT_EQ(qs, synth_queries(p));
  std::ostringstream out;
  write_queries(qs, out);
  std::istringstream in(out.str());
  EXPECT_EQ(read_queries(in), qs);
}

TEST(Stats, StudentQuantiles) {
  EXPECT_NEAR(student_t_975(1), 12.706205, 1e-5);
  EXPECT_NEAR(student_t_975(2), 4.302653, 1e-5);
  EXPECT_NEAR(student_t_975(4), 2.776445, 1e-5);
  EXPECT_NEAR(student_t_975(30), 2.042272, 1e-5);
}

TEST(Stats, MeanAndInterval) {
  const std::vector<double> one{3.0};
  EXPECT_FALSE(mean_ci(one).half_width);
  EXPECT_DOUBLE_EQ(mean_ci(one).mean, 3.0);
  const std::vector<double> five{1, 2, 3, 4, 5};
  const auto m = mean_ci(five);
  EXPECT_DOUBLE_EQ(m.mean, 3.0);
  ASSERT_TRUE(m.half_width);
  EXPECT_NEAR(*m.half_width, 2.776445 * std::sqrt(2.5) / std::sqrt(5.0), 1e-5);
}

TEST(Layouts, Parse) {
  EXPECT_EQ(parse_layout("1b").cap_exponent, 0u);
  EXPECT_EQ(parse_layout("32b").cap_exponent, 5u);
  EXPECT_EQ(parse_layout("7").cap_exponent, 7u);
  EXPECT_TRUE(parse_layout("COMPACT").compact);
  EXPECT_THROW(parse_layout("3b"), InvariantViolation);
  EXPECT_THROW(parse_layout("256b"), InvariantViolation);
  const auto all = parse_layouts("1b,32b,COMPACT");
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[1].label, "32b");
}

TEST(Layouts, Buckets) {
  EXPECT_EQ(length_bucket(1), "1");
  EXPECT_EQ(length_bucket(4), "4");
  EXPECT_EQ(length_bucket(5), "5+");
  EXPECT_EQ(length_bucket(9), "5+");
}

TEST(Latency, SuiteReportsEveryLayoutAndBucket) {
  SynthParams p;
  p.doc_count = 2000;
  p.vocab_size = 500;
  p.avg_len = 20;
  const auto corpus = synth(p);
  QuerySynthParams qp;
  qp.count = 50;
  qp.vocab_size = 300;
  const auto queries = synth_queries(qp);
  const auto layouts = parse_layouts("1b,4b,COMPACT");
  LatencyOptions opt;
  opt.trials = 2;
  opt.pool = {1 << 20};
  for (auto mode : {QueryMode::kSvs, QueryMode::kWand}) {
    opt.mode = mode;
    const auto report = run_latency_suite(corpus, queries, layouts, opt);
    for (const auto& l : layouts) {
      const auto* row = report.find(l.label);
      ASSERT_NE(row, nullptr) << l.label;
      EXPECT_EQ(row->trials, 2u);
      EXPECT_EQ(row->trial_ms.size(), 2u);
      EXPECT_TRUE(row->ci_ms);
      EXPECT_GE(row->mean_ms, 0.0);
    }
    std::ostringstream csv;
    write_latency_csv(report, csv);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
              "config,mode,query_len_bucket,mean_ms,ci_ms,trials");
  }
  opt.trials = 1;
  const auto single = run_latency_suite(corpus, queries, layouts, opt);
  EXPECT_FALSE(single.find("1b")->ci_ms);
  std::ostringstream csv;
  write_latency_csv(single, csv);
  EXPECT_NE(csv.str().find(",NA,"), std::string::npos);
}

TEST(Indexing, SuiteHandlesEmptyAndSmallCorpora) {
  SynthParams p;
  p.doc_count = 0;
  const auto empty = synth(p);
  const std::vector<std::uint32_t> caps{0, 5};
  const auto rows = run_indexing_suite(empty, caps, Config{}, 1, {1 << 20});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].documents, 0u);
  p.doc_count = 300;
  const auto small = synth(p);
  const auto more = run_indexing_suite(small, caps, Config{}, 3, {1 << 20});
  EXPECT_EQ(more[1].config, "32b");
  EXPECT_EQ(more[1].trial_s.size(), 3u);
  EXPECT_GT(more[1].docs_per_sec, 0.0);
  std::ostringstream csv;
  write_indexing_csv(more, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "config,documents,trials,mean_s,ci_s,docs_per_sec");
}

TEST(Memory, ReportAgainstOracle) {
  const auto docs = testing::random_docs(5, 3000, 800, 1.2, 40);
  const auto naive = testing::naive_index(docs);
  BufferMemory prev;
  for (std::uint32_t m = 0; m <= 7; ++m) {
    Config c;
    c.cap_exponent = m;
    c.block_size = 16;
    const auto index = testing::index_docs(docs, c);
    const auto report = stats_report(index);
    const auto retained = naive.retained(c.df_threshold).size();
    EXPECT_EQ(report.retained_terms, retained);
    EXPECT_EQ(report.discarded_terms, naive.postings().size() - retained);
    EXPECT_EQ(report.vocabulary_seen, naive.postings().size());
    ASSERT_EQ(report.buffer_length_fractions.size(), m + 1);
    EXPECT_NEAR(std::accumulate(report.buffer_length_fractions.begin(),
                                report.buffer_length_fractions.end(), 0.0),
                1.0, 1e-12);
    EXPECT_GE(report.peak_buffers.total(), prev.total());
    prev = report.peak_buffers;

    std::vector<MemoryReport> reports{report};
    std::ostringstream csv;
    write_memory_csv(reports, csv);
    EXPECT_NE(csv.str().find("peak_docid_bytes"), std::string::npos);
  }
}

}  // namespace
}  // namespace incidx
