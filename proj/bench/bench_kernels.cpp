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

// Serial reference versus OpenMP kernels: batch queries, upper-bound
// preparation and compaction.

#include <benchmark/benchmark.h>

#include <memory>
#include <sstream>

#include "incidx/bench.hpp"
#include "incidx/index_io.hpp"
#include "incidx/parallel.hpp"

namespace {

using namespace incidx;

struct Fixture {
  Index index;
  parallel::QueryBatch queries;
};

const Fixture& fixture() {
  static const std::unique_ptr<Fixture> f = [] {
    bench::SynthParams p;
    p.doc_count = 50000;
    p.vocab_size = 20000;
    p.avg_len = 40;
    std::stringstream text;
    bench::synth_corpus(p, text);
    const auto corpus = Corpus::read(text);
    Config c;
    c.cap_exponent = 0;
    PoolOptions pool;
    pool.block_bytes = 16 << 20;
    bench::QuerySynthParams qp;
    qp.count = 500;
    return std::make_unique<Fixture>(Fixture{build_index(corpus, c, pool), bench::synth_queries(qp)});
  }();
  return *f;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto& f = fixture();
  const QueryEngine engine(f.index);
  const auto mode = static_cast<QueryMode>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::run_batch_serial(engine, f.queries, mode, 100));
  }
}
BENCHMARK(BM_BatchSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BatchParallel(benchmark::State& state) {
  const auto& f = fixture();
  const QueryEngine engine(f.index);
  const auto mode = static_cast<QueryMode>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::run_batch(engine, f.queries, mode, 100, threads));
  }
}
BENCHMARK(BM_BatchParallel)
    ->ArgsProduct({{0, 1}, {1, 2, 4}})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

void BM_BoundsSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(prepare_upper_bounds(f.index));
}
BENCHMARK(BM_BoundsSerial)->Unit(benchmark::kMillisecond);

void BM_BoundsParallel(benchmark::State& state) {
  const auto& f = fixture();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::prepare_upper_bounds(f.index, {}, threads));
  }
}
BENCHMARK(BM_BoundsParallel)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

void BM_CompactSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    auto r = compact(f.index.pool(), f.index.lexicon(), f.index.pool().options());
    benchmark::DoNotOptimize(r.pool.end());
  }
}
BENCHMARK(BM_CompactSerial)->Unit(benchmark::kMillisecond);

void BM_CompactParallel(benchmark::State& state) {
  const auto& f = fixture();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = parallel::compact(f.index.pool(), f.index.lexicon(), f.index.pool().options(),
                               threads);
    benchmark::DoNotOptimize(r.pool.end());
  }
}
BENCHMARK(BM_CompactParallel)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
