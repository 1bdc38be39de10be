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

#include <iosfwd>
#include <string>

#include "incidx/index.hpp"

namespace incidx {

// Rewrites the pool so every term's segments sit back to back, terms in id
// order. Postings are unchanged; only offsets move.
struct CompactResult {
  SegmentPool pool;
  Lexicon lexicon;
};

CompactResult compact(const SegmentPool& pool, const Lexicon& lexicon,
                      PoolOptions options);

// compact() applied to a whole index; stats carry over.
Index compact_index(const Index& index);
Index compact_index(const Index& index, PoolOptions options);

// Index file, all integers little-endian:
//
//   "INCIDX\0\0"  u32 version  u32 reserved
//   u32 block_size  u32 cap_exponent  u32 df_threshold  u32 positional
//   u64 pool_block_bytes
//   u64 vocabulary  { u16 len  bytes  u32 df  u64 head  u64 tail } x vocabulary
//   u64 doc_count  u64 total_tokens  { u32 docid  u32 length } x doc_count
//   u64 peak_docid_bytes  u64 peak_tf_bytes  u64 peak_position_bytes
//   u64 vocabulary_seen  u64 discarded_terms  u32 n  u64 histogram[n]
//   u64 segments  u64 segment_bytes  u64 padding_bytes  u64 block_waste_bytes
//   u64 pool_length  pool bytes
inline constexpr std::uint32_t kIndexFormatVersion = 1;

void write_index(const Index& index, std::ostream& out);
void save_index(const Index& index, const std::string& path);

// Throws FileFormatError on a bad magic, unknown version, truncation or
// trailing bytes; IoError when the file cannot be read.
Index read_index(std::istream& in);
Index load_index(const std::string& path);

}  // namespace incidx
