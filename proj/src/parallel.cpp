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

#include "incidx/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace incidx::parallel {
namespace {

int resolve_threads(int threads) { return threads > 0 ? threads : max_threads(); }

// Exceptions must not cross an OpenMP region boundary; the first one is kept
// and rethrown on the calling thread.
class FirstError {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

std::vector<QueryResult> run_batch_serial(const QueryEngine& engine, const QueryBatch& queries,
                                          QueryMode mode, std::size_t k) {
  std::vector<QueryResult> results;
  results.reserve(queries.size());
  for (const auto& q : queries) results.push_back(engine.run(q, mode, k));
  return results;
}

std::vector<QueryResult> run_batch(const QueryEngine& engine, const QueryBatch& queries,
                                   QueryMode mode, std::size_t k, [[maybe_unused]] int threads) {
  std::vector<QueryResult> results(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
  FirstError errors;
#pragma omp parallel for schedule(dynamic, 4) num_threads(resolve_threads(threads))
  for (std::int64_t i = 0; i < n; ++i) {
    errors.run([&] { results[i] = engine.run(queries[i], mode, k); });
  }
  errors.rethrow();
  return results;
}

std::vector<double> prepare_upper_bounds(const Index& index, const Bm25Params& params,
                                         [[maybe_unused]] int threads) {
  const Lexicon& lexicon = index.lexicon();
  const CollectionStats& stats = index.collection();
  std::vector<double> bounds(lexicon.size(), 0.0);
  const auto n = static_cast<std::int64_t>(lexicon.size());
  FirstError errors;
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_threads(threads))
  for (std::int64_t t = 0; t < n; ++t) {
    errors.run([&] {
      const auto& entry = lexicon.entry(static_cast<TermId>(t));
      double best = 0.0;
      for (PostingsCursor c(index.pool(), entry.head); !c.exhausted(); c.next()) {
        best = std::max(best, bm25_score(c.tf(), entry.df, stats.doclen(c.docid()),
                                         stats.doc_count(), stats.avg_doclen(), params));
      }
      bounds[t] = best;
    });
  }
  errors.rethrow();
  return bounds;
}

CompactResult compact(const SegmentPool& pool, const Lexicon& lexicon, PoolOptions options,
                      int threads) {
  struct Piece {
    PoolOffset from;
    std::size_t length;
  };
  const auto n = static_cast<std::int64_t>(lexicon.size());
  [[maybe_unused]] const int team = resolve_threads(threads);
  std::vector<std::vector<Piece>> chains(lexicon.size());
  FirstError errors;

#pragma omp parallel for schedule(dynamic, 64) num_threads(team)
  for (std::int64_t t = 0; t < n; ++t) {
    errors.run([&] {
      for (PoolOffset at = lexicon.entry(static_cast<TermId>(t)).head; at != kNoOffset;) {
        const auto seg = pool.view(at);
        chains[t].push_back({at, seg.byte_length});
        at = seg.next;
      }
    });
  }
  errors.rethrow();

  std::vector<std::size_t> sizes;
  std::vector<std::size_t> first_piece(lexicon.size() + 1, 0);
  for (std::size_t t = 0; t < chains.size(); ++t) {
    first_piece[t] = sizes.size();
    for (const auto& p : chains[t]) sizes.push_back(p.length);
  }
  first_piece[chains.size()] = sizes.size();

  SegmentPool out(pool.block_size(), pool.positional(), options);
  const auto offsets = out.reserve_segments(sizes);

#pragma omp parallel for schedule(dynamic, 64) num_threads(team)
  for (std::int64_t t = 0; t < n; ++t) {
    errors.run([&] {
      const auto& pieces = chains[t];
      const std::size_t base = first_piece[t];
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const PoolOffset next = i + 1 < pieces.size() ? offsets[base + i + 1] : kNoOffset;
        out.write_reserved(offsets[base + i],
                           std::span(pool.data_at(pieces[i].from), pieces[i].length), next);
      }
    });
  }
  errors.rethrow();

  std::vector<TermEntry> entries = lexicon.entries();
  for (std::size_t t = 0; t < entries.size(); ++t) {
    if (chains[t].empty()) {
      entries[t].head = entries[t].tail = kNoOffset;
      continue;
    }
    entries[t].head = offsets[first_piece[t]];
    entries[t].tail = offsets[first_piece[t + 1] - 1];
  }
  return {std::move(out), Lexicon(std::move(entries))};
}

Index compact_index(const Index& index, PoolOptions options, int threads) {
  auto [pool, lexicon] = compact(index.pool(), index.lexicon(), options, threads);
  return Index(index.config(), std::move(lexicon), index.collection(), index.build_stats(),
               std::move(pool));
}

}  // namespace incidx::parallel
