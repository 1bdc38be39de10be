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

#include "incidx/query.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "incidx/error.hpp"
#include "oracle.hpp"

namespace incidx {
namespace {

using testing::TestDoc;

Config small_config(std::uint32_t block = 4, std::uint32_t threshold = 1, std::uint32_t m = 2) {
  Config c;
  c.block_size = block;
  c.df_threshold = threshold;
  c.cap_exponent = m;
  return c;
}

// A term "t" present in exactly the given documents, plus filler.
std::vector<TestDoc> docs_with(const std::vector<DocId>& ids, DocId last) {
  std::vector<TestDoc> docs;
  std::size_t j = 0;
  for (DocId d = 1; d <= last; ++d) {
    TestDoc doc{d, {"filler"}};
    if (j < ids.size() && ids[j] == d) {
      doc.tokens.push_back("t");
      ++j;
    }
    docs.push_back(doc);
  }
  return docs;
}

TEST(Gallop, FindsNextGreaterOrEqual) {
  const auto index = testing::index_docs(docs_with({2, 4, 8, 16}, 20), small_config(2));
  const auto t = *index.lexicon().lookup("t");
  PostingsCursor c(index.pool(), index.lexicon().entry(t).head);
  EXPECT_EQ(gallop_advance(c, 5), 8u);
  EXPECT_EQ(gallop_advance(c, 8), 8u);
  EXPECT_EQ(gallop_advance(c, 16), 16u);
  EXPECT_EQ(gallop_advance(c, 17), kExhausted);
  EXPECT_TRUE(c.exhausted());
}

TEST(Gallop, AgreesWithLinearScan) {
  std::mt19937_64 rng(5);
  for (int list = 0; list < 20; ++list) {
    std::vector<DocId> ids;
    DocId d = 0;
    const auto n = 1 + rng() % 400;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(d += 1 + rng() % 6);
    const auto index = testing::index_docs(docs_with(ids, d + 2), small_config(8, 1, 3));
    const auto head = index.lexicon().entry(*index.lexicon().lookup("t")).head;
    for (int q = 0; q < 500; ++q) {
      PostingsCursor c(index.pool(), head);
      // a short run of increasing targets per cursor
      DocId target = rng() % (d / 4 + 2);
      for (int step = 0; step < 4; ++step) {
        const auto it = std::lower_bound(ids.begin(), ids.end(), target);
        const DocId expect = it == ids.end() ? kExhausted : *it;
        ASSERT_EQ(gallop_advance(c, target), expect);
        if (expect == kExhausted) break;
        target = expect + rng() % (d / 4 + 1);
      }
    }
  }
}

TEST(Svs, SmallCases) {
  std::vector<TestDoc> docs{{1, {"a", "b"}}, {2, {"a"}}, {3, {"b", "c"}}, {4, {"a", "b"}}};
  const auto index = testing::index_docs(docs, small_config());
  const QueryEngine engine(index);
  using V = std::vector<std::string>;
  EXPECT_EQ(engine.svs(V{"a"}), (std::vector<DocId>{1, 2, 4}));
  EXPECT_EQ(engine.svs(V{"a", "b"}), (std::vector<DocId>{1, 4}));
  EXPECT_EQ(engine.svs(V{"b", "a", "b"}), (std::vector<DocId>{1, 4}));
  EXPECT_TRUE(engine.svs(V{"a", "c"}).empty());
  EXPECT_TRUE(engine.svs(V{"a", "zzz"}).empty());
  EXPECT_TRUE(engine.svs(V{}).empty());
}

TEST(Svs, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto docs = testing::random_docs(seed, 1500, 300, 1.0, 30);
    const auto naive = testing::naive_index(docs);
    Config c = small_config(seed % 2 ? 128 : 16, 5, static_cast<std::uint32_t>(seed));
    const auto index = testing::index_docs(docs, c);
    const auto retained = naive.retained(c.df_threshold);
    const QueryEngine engine(index);
    std::vector<std::string> vocab(retained.begin(), retained.end());
    std::mt19937_64 rng(seed);
    for (int q = 0; q < 300; ++q) {
      const auto query = testing::random_query(rng, vocab, 2, 5);
      ASSERT_EQ(engine.svs(query), testing::brute_intersection(naive, retained, query));
    }
  }
}

TEST(Bm25, MatchesReferenceFormula) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t n = 1 + rng() % 1000000;
    const std::uint32_t df = 1 + static_cast<std::uint32_t>(rng() % n);
    const std::uint32_t tf = 1 + rng() % 50;
    const std::uint32_t len = tf + rng() % 500;
    const double avg = 1.0 + static_cast<double>(rng() % 300);
    EXPECT_NEAR(bm25_score(tf, df, len, n, avg),
                testing::reference_bm25(tf, df, len, static_cast<double>(n), avg), 1e-12);
  }
}

TEST(Bm25, MonotoneInTfAndDf) {
  for (std::uint32_t tf = 1; tf < 50; ++tf) {
    EXPECT_LT(bm25_score(tf, 10, 100, 1000, 80.0), bm25_score(tf + 1, 10, 100, 1000, 80.0));
  }
  for (std::uint32_t df = 1; df < 999; df += 7) {
    EXPECT_GT(bm25_score(3, df, 100, 1000, 80.0), bm25_score(3, df + 1, 100, 1000, 80.0));
  }
  // idf stays positive even for a term in every document
  EXPECT_GT(bm25_score(1, 1000, 100, 1000, 80.0), 0.0);
}

TEST(UpperBounds, AuditedAgainstEveryPosting) {
  const auto docs = testing::random_docs(21, 800, 200, 1.1, 40);
  const auto index = testing::index_docs(docs, small_config(16, 1, 3));
  const auto bounds = prepare_upper_bounds(index);
  ASSERT_EQ(bounds.size(), index.lexicon().size());
  const auto& coll = index.collection();
  for (TermId t = 0; t < index.lexicon().size(); ++t) {
    const auto p = index.postings(t);
    double best = 0.0;
    for (std::size_t i = 0; i < p.docids.size(); ++i) {
      const double s = bm25_score(p.tfs[i], index.lexicon().entry(t).df, coll.doclen(p.docids[i]),
                                  coll.doc_count(), coll.avg_doclen());
      EXPECT_GE(bounds[t], s);
      best = std::max(best, s);
    }
    EXPECT_EQ(bounds[t], best);
  }
}

void expect_same_hits(const std::vector<ScoredHit>& got,
                      const std::vector<testing::RefHit>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].docid, want[i].docid) << "rank " << i;
    EXPECT_NEAR(got[i].score, want[i].score, 1e-9) << "rank " << i;
  }
}

TEST(Wand, SmallCases) {
  std::vector<TestDoc> docs{{1, {"a", "b"}}, {2, {"a"}}, {3, {"b", "c"}}};
  const auto index = testing::index_docs(docs, small_config());
  const QueryEngine engine(index);
  const auto naive = testing::naive_index(docs);
  const auto retained = naive.retained(1);
  using V = std::vector<std::string>;
  // k beyond the match count returns every match
  expect_same_hits(engine.wand(V{"a", "c"}, 10), testing::exhaustive_topk(naive, retained, {"a", "c"}, 10));
  EXPECT_EQ(engine.wand(V{"a", "c"}, 10).size(), 3u);
  expect_same_hits(engine.wand(V{"a"}, 1), testing::exhaustive_topk(naive, retained, {"a"}, 1));
  EXPECT_EQ(engine.wand(V{"a", "nope"}, 5), engine.wand(V{"a"}, 5));
  EXPECT_TRUE(engine.wand(V{"nope"}, 5).empty());
  EXPECT_THROW(engine.wand(V{"a"}, 0), InvariantViolation);
}

TEST(Wand, MatchesExhaustiveScoring) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto docs = testing::random_docs(seed + 40, 2000, 500, 1.1, 40);
    const auto naive = testing::naive_index(docs);
    Config c = small_config(seed % 2 ? 128 : 32, 3, static_cast<std::uint32_t>(seed * 2));
    const auto index = testing::index_docs(docs, c);
    const auto retained = naive.retained(c.df_threshold);
    const QueryEngine engine(index);
    std::vector<std::string> vocab(retained.begin(), retained.end());
    vocab.push_back("unknown-term");
    std::mt19937_64 rng(seed);
    for (int q = 0; q < 150; ++q) {
      const auto query = testing::random_query(rng, vocab, 1, 5);
      for (std::size_t k : {10u, 1000u}) {
        SCOPED_TRACE(q);
        expect_same_hits(engine.wand(query, k), testing::exhaustive_topk(naive, retained, query, k));
      }
    }
  }
}

TEST(QueryFile, ParsesLines) {
  EXPECT_EQ(parse_query_line("  a b  c "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(parse_query_line("").empty());
  std::istringstream in("a b\n\nc\r\n");
  const auto qs = read_queries(in);
  ASSERT_EQ(qs.size(), 3u);
  EXPECT_TRUE(qs[1].empty());
  EXPECT_EQ(qs[2], std::vector<std::string>{"c"});
}

TEST(QueryEngine, RunDispatches) {
  std::vector<TestDoc> docs{{1, {"a", "b"}}, {2, {"a"}}};
  const auto index = testing::index_docs(docs, small_config());
  const QueryEngine engine(index);
  const std::vector<std::string> q{"a", "b"};
  const auto s = engine.run(q, QueryMode::kSvs, 10);
  EXPECT_EQ(s.count, 1u);
  EXPECT_EQ(s.docids, std::vector<DocId>{1});
  const auto w = engine.run(q, QueryMode::kWand, 10);
  EXPECT_EQ(w.count, 2u);
  EXPECT_EQ(w.hits.front().docid, 1u);
}

}  // namespace
}  // namespace incidx
