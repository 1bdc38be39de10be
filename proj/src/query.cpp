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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>

#include "incidx/error.hpp"

namespace incidx {

double bm25_score(std::uint32_t tf, std::uint32_t df, std::uint32_t doclen,
                  std::uint64_t doc_count, double avg_doclen, const Bm25Params& params) {
  const double n = static_cast<double>(doc_count);
  const double d = static_cast<double>(df);
  const double idf = std::log((n - d + 0.5) / (d + 0.5) + 1.0);
  const double t = static_cast<double>(tf);
  const double norm =
      params.k1 * (1.0 - params.b + params.b * static_cast<double>(doclen) / avg_doclen);
  return idf * t * (params.k1 + 1.0) / (t + norm);
}

PostingsCursor::PostingsCursor(const SegmentPool& pool, PoolOffset head) : pool_(&pool) {
  if (head == kNoOffset) {
    exhausted_ = true;
    return;
  }
  load(head);
}

void PostingsCursor::load(PoolOffset offset) {
  segment_ = pool_->view(offset);
  pool_->decode_docids(segment_, docids_);
  index_ = 0;
  tfs_ready_ = false;
  ++segments_loaded_;
}

std::uint32_t PostingsCursor::tf() {
  if (!tfs_ready_) {
    pool_->decode_tfs(segment_, tfs_);
    tfs_ready_ = true;
  }
  return tfs_[index_];
}

void PostingsCursor::next() {
  if (exhausted_) return;
  if (++index_ < docids_.size()) return;
  if (segment_.next == kNoOffset) {
    exhausted_ = true;
    return;
  }
  load(segment_.next);
}

bool PostingsCursor::advance(DocId target) {
  if (exhausted_) return false;
  if (docids_[index_] >= target) return true;
  while (docids_.back() < target) {
    if (segment_.next == kNoOffset) {
      exhausted_ = true;
      return false;
    }
    load(segment_.next);
  }
  if (docids_[index_] >= target) return true;

  // docids_[lo] < target <= docids_.back()
  const std::size_t n = docids_.size();
  std::size_t lo = index_;
  std::size_t step = 1;
  std::size_t hi = index_ + 1;
  while (hi < n && docids_[hi] < target) {
    lo = hi;
    step <<= 1;
    hi = index_ + step;
  }
  hi = std::min(hi, n - 1);
  const auto first = docids_.begin() + static_cast<std::ptrdiff_t>(lo + 1);
  const auto last = docids_.begin() + static_cast<std::ptrdiff_t>(hi + 1);
  index_ = static_cast<std::size_t>(std::lower_bound(first, last, target) - docids_.begin());
  return true;
}

DocId gallop_advance(PostingsCursor& cursor, DocId target) {
  return cursor.advance(target) ? cursor.docid() : kExhausted;
}

std::vector<DocId> svs_intersect(const Index& index, std::span<const TermId> terms) {
  if (terms.empty()) return {};
  const Lexicon& lexicon = index.lexicon();
  std::vector<TermId> order(terms.begin(), terms.end());
  std::sort(order.begin(), order.end(), [&](TermId a, TermId b) {
    const auto da = lexicon.entry(a).df;
    const auto db = lexicon.entry(b).df;
    return da != db ? da < db : a < b;
  });

  std::vector<DocId> result;
  {
    PostingsCursor cursor(index.pool(), lexicon.entry(order[0]).head);
    result.reserve(lexicon.entry(order[0]).df);
    for (; !cursor.exhausted(); cursor.next()) result.push_back(cursor.docid());
  }
  std::vector<DocId> kept;
  for (std::size_t i = 1; i < order.size() && !result.empty(); ++i) {
    PostingsCursor cursor(index.pool(), lexicon.entry(order[i]).head);
    kept.clear();
    for (DocId d : result) {
      if (!cursor.advance(d)) break;
      if (cursor.docid() == d) kept.push_back(d);
    }
    result.swap(kept);
  }
  return result;
}

bool ranks_before(const ScoredHit& a, const ScoredHit& b) {
  return a.score != b.score ? a.score > b.score : a.docid < b.docid;
}

std::vector<double> prepare_upper_bounds(const Index& index, const Bm25Params& params) {
  const Lexicon& lexicon = index.lexicon();
  const CollectionStats& stats = index.collection();
  std::vector<double> bounds(lexicon.size(), 0.0);
  for (TermId t = 0; t < lexicon.size(); ++t) {
    const auto& entry = lexicon.entry(t);
    double best = 0.0;
    for (PostingsCursor c(index.pool(), entry.head); !c.exhausted(); c.next()) {
      best = std::max(best, bm25_score(c.tf(), entry.df, stats.doclen(c.docid()),
                                       stats.doc_count(), stats.avg_doclen(), params));
    }
    bounds[t] = best;
  }
  return bounds;
}

namespace {

struct WandTerm {
  PostingsCursor cursor;
  double bound;
  std::uint32_t df;
  std::size_t slot;
};

// Bound sums and exact scores are added in different orders; the slack keeps
// rounding from skipping a document whose true score equals its bound.
constexpr double kBoundSlack = 1e-9;

}  // namespace

std::vector<ScoredHit> wand_topk(const Index& index, std::span<const TermId> terms,
                                 std::size_t k, std::span<const double> upper_bounds,
                                 const Bm25Params& params) {
  if (k == 0) throw InvariantViolation("wand_topk: k must be >= 1");
  const Lexicon& lexicon = index.lexicon();
  const CollectionStats& stats = index.collection();

  std::vector<WandTerm> cursors;
  cursors.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& entry = lexicon.entry(terms[i]);
    cursors.push_back({PostingsCursor(index.pool(), entry.head), upper_bounds[terms[i]],
                       entry.df, i});
  }
  std::vector<WandTerm*> live;
  for (auto& c : cursors) {
    if (!c.cursor.exhausted()) live.push_back(&c);
  }

  // heap.front() is the hit that ranks last.
  std::vector<ScoredHit> heap;
  heap.reserve(k);
  const auto heap_order = [](const ScoredHit& a, const ScoredHit& b) {
    return ranks_before(a, b);
  };
  std::vector<double> contributions(terms.size(), 0.0);

  const auto by_docid = [](const WandTerm* a, const WandTerm* b) {
    const DocId da = a->cursor.docid();
    const DocId db = b->cursor.docid();
    return da != db ? da < db : a->slot < b->slot;
  };

  while (!live.empty()) {
    std::sort(live.begin(), live.end(), by_docid);
    const bool full = heap.size() == k;
    const double threshold = full ? heap.front().score : -1.0;

    std::size_t pivot = live.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < live.size(); ++i) {
      acc += live[i]->bound;
      if (!full || acc + kBoundSlack * std::abs(acc) > threshold) {
        pivot = i;
        break;
      }
    }
    if (pivot == live.size()) break;

    const DocId target = live[pivot]->cursor.docid();
    if (live.front()->cursor.docid() == target) {
      std::fill(contributions.begin(), contributions.end(), 0.0);
      const std::uint32_t doclen = stats.doclen(target);
      std::size_t matched = 0;
      while (matched < live.size() && live[matched]->cursor.docid() == target) {
        WandTerm& t = *live[matched];
        contributions[t.slot] = bm25_score(t.cursor.tf(), t.df, doclen, stats.doc_count(),
                                           stats.avg_doclen(), params);
        ++matched;
      }
      double score = 0.0;
      for (double c : contributions) score += c;

      if (!full) {
        heap.push_back({target, score});
        std::push_heap(heap.begin(), heap.end(), heap_order);
      } else if (score > threshold) {
        std::pop_heap(heap.begin(), heap.end(), heap_order);
        heap.back() = {target, score};
        std::push_heap(heap.begin(), heap.end(), heap_order);
      }
      for (std::size_t i = 0; i < matched; ++i) live[i]->cursor.next();
    } else {
      for (std::size_t i = 0; i < pivot; ++i) {
        if (live[i]->cursor.docid() < target) live[i]->cursor.advance(target);
      }
    }
    std::erase_if(live, [](const WandTerm* t) { return t->cursor.exhausted(); });
  }

  std::sort(heap.begin(), heap.end(), ranks_before);
  return heap;
}

std::vector<std::string> parse_query_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> terms;
  while (!line.empty()) {
    const auto space = line.find_first_of(" \t");
    const auto term = line.substr(0, space);
    if (!term.empty()) terms.emplace_back(term);
    if (space == std::string_view::npos) break;
    line.remove_prefix(space + 1);
  }
  return terms;
}

std::vector<std::vector<std::string>> read_queries(std::istream& in) {
  std::vector<std::vector<std::string>> queries;
  std::string line;
  while (std::getline(in, line)) queries.push_back(parse_query_line(line));
  if (in.bad()) throw IoError("read error on query stream");
  return queries;
}

std::vector<std::vector<std::string>> read_queries_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open queries '" + path + "'");
  return read_queries(in);
}

QueryEngine::QueryEngine(const Index& index, Bm25Params params)
    : QueryEngine(index, prepare_upper_bounds(index, params), params) {}

QueryEngine::QueryEngine(const Index& index, std::vector<double> upper_bounds,
                         Bm25Params params)
    : index_(&index), params_(params), bounds_(std::move(upper_bounds)) {
  if (bounds_.size() != index.lexicon().size()) {
    throw InvariantViolation("upper bound table does not match the lexicon");
  }
}

std::vector<TermId> QueryEngine::resolve(std::span<const std::string> terms,
                                         bool& missing) const {
  missing = false;
  std::vector<TermId> ids;
  for (const auto& term : terms) {
    const auto id = index_->lexicon().lookup(term);
    if (!id) {
      missing = true;
      continue;
    }
    if (std::find(ids.begin(), ids.end(), *id) == ids.end()) ids.push_back(*id);
  }
  return ids;
}

std::vector<DocId> QueryEngine::svs(std::span<const std::string> terms) const {
  bool missing = false;
  const auto ids = resolve(terms, missing);
  if (missing) return {};
  return svs_intersect(*index_, ids);
}

std::vector<ScoredHit> QueryEngine::wand(std::span<const std::string> terms,
                                         std::size_t k) const {
  bool missing = false;
  const auto ids = resolve(terms, missing);
  if (ids.empty()) return {};
  return wand_topk(*index_, ids, k, bounds_, params_);
}

QueryResult QueryEngine::run(std::span<const std::string> terms, QueryMode mode,
                             std::size_t k) const {
  QueryResult result;
  if (mode == QueryMode::kSvs) {
    result.docids = svs(terms);
    result.count = result.docids.size();
  } else {
    result.hits = wand(terms, k);
    result.count = result.hits.size();
  }
  return result;
}

}  // namespace incidx
