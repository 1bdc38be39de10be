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

// OpenMP versions of the data-parallel passes. Each has a serial reference
// (run_batch_serial, incidx::prepare_upper_bounds, incidx::compact) that
// produces identical output; tests hold them to that. threads <= 0 means the
// OpenMP default. Without OpenMP everything runs on the calling thread.

#include <string>
#include <vector>

#include "incidx/index_io.hpp"
#include "incidx/query.hpp"

namespace incidx::parallel {

int max_threads();
bool openmp_enabled();

using QueryBatch = std::vector<std::vector<std::string>>;

std::vector<QueryResult> run_batch_serial(const QueryEngine& engine, const QueryBatch& queries,
                                          QueryMode mode, std::size_t k);

// Queries are independent; each thread owns its cursors.
std::vector<QueryResult> run_batch(const QueryEngine& engine, const QueryBatch& queries,
                                   QueryMode mode, std::size_t k, int threads = 0);

// Terms are scanned independently.
std::vector<double> prepare_upper_bounds(const Index& index, const Bm25Params& params,
                                         int threads = 0);

// Chains are measured in parallel, laid out serially (placement is a prefix
// sum over segment sizes) and then copied in parallel. Byte-identical to
// incidx::compact.
CompactResult compact(const SegmentPool& pool, const Lexicon& lexicon, PoolOptions options,
                      int threads = 0);

Index compact_index(const Index& index, PoolOptions options, int threads = 0);

}  // namespace incidx::parallel
