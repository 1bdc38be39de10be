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

// Append-only segment pool.
//
// A segment is one compressed run of at most block_size postings of a term:
//
//   u64 next              offset of the next segment of the term, or kNoOffset
//   u32 posting_count
//   u32 |D|  D            gapped docids, first docid absolute
//   u32 |F|  F            raw tfs
//   positional only:
//   u32 block_count
//   { u32 |P_i|  P_i } x block_count    per-document gapped positions
//
// Integers are little-endian and the blocks use the codec layout. Segments
// start on 4-byte boundaries and never straddle an allocation block; a
// segment that would straddle starts at the next block instead.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "incidx/buffers.hpp"
#include "incidx/codec.hpp"
#include "incidx/config.hpp"
#include "incidx/dictionary.hpp"

namespace incidx {

inline constexpr std::size_t kSegmentHeaderBytes = 12;
inline constexpr std::size_t kSegmentAlignment = 4;

struct PoolStats {
  std::uint64_t segments = 0;
  std::uint64_t segment_bytes = 0;
  // Alignment bytes between segments.
  std::uint64_t padding_bytes = 0;
  // Unused tail bytes of allocation blocks skipped to avoid straddling.
  std::uint64_t block_waste_bytes = 0;

  friend bool operator==(const PoolStats&, const PoolStats&) = default;
};

struct AppendResult {
  // First new segment; the term's head when tail was kNoOffset.
  PoolOffset first = kNoOffset;
  PoolOffset tail = kNoOffset;
  std::vector<PoolOffset> segments;
};

// Located but undecoded segment.
struct SegmentView {
  PoolOffset offset = kNoOffset;
  PoolOffset next = kNoOffset;
  std::uint32_t posting_count = 0;
  std::span<const std::uint8_t> docids;
  std::span<const std::uint8_t> tfs;
  std::uint32_t position_blocks = 0;
  // The { |P_i|, P_i } records.
  std::span<const std::uint8_t> positions;
  // Header through the last block, excluding alignment padding.
  std::size_t byte_length = 0;
};

struct DecodedSegment {
  PoolOffset next = kNoOffset;
  std::vector<DocId> docids;
  std::vector<std::uint32_t> tfs;
  // Flat positions, split per document by tfs.
  std::vector<std::uint32_t> positions;

  codec::PerDocPositions per_doc_positions() const;
};

// Encodes one segment (next = kNoOffset) and appends it to out.
void encode_segment(std::span<const DocId> docids, std::span<const std::uint32_t> tfs,
                    std::span<const std::uint32_t> positions, bool positional,
                    std::uint32_t block_size, std::vector<std::uint8_t>& out);

class SegmentPool {
 public:
  SegmentPool(std::uint32_t block_size, bool positional, PoolOptions options = {});

  SegmentPool(SegmentPool&&) noexcept = default;
  SegmentPool& operator=(SegmentPool&&) noexcept = default;

  // Splits the flush into segments of block_size postings, writes them
  // back-to-back at the end of the pool, chains them, and patches tail's next
  // pointer to the first one. Throws CapacityError without writing anything
  // if the memory budget cannot hold the group.
  AppendResult append_segments(const FlushRequest& flush, PoolOffset tail);

  // Copies an already-encoded segment and sets its next pointer. Used by
  // compaction.
  PoolOffset append_raw(std::span<const std::uint8_t> segment, PoolOffset next);

  // Reserves space for segments of the given byte sizes, in order, exactly
  // where successive append_raw calls would put them, and returns their
  // offsets. Regions must then be filled with write_reserved; distinct
  // regions may be filled concurrently.
  std::vector<PoolOffset> reserve_segments(std::span<const std::size_t> sizes);
  void write_reserved(PoolOffset offset, std::span<const std::uint8_t> segment,
                      PoolOffset next);

  // Rewrites the next pointer of the segment at offset.
  void patch_next(PoolOffset offset, PoolOffset next);

  // Parses and bounds-checks the segment header. Throws CorruptSegment.
  SegmentView view(PoolOffset offset) const;

  DecodedSegment read_segment(PoolOffset offset) const;
  void read_segment(PoolOffset offset, DecodedSegment& out) const;

  void decode_docids(const SegmentView& seg, std::vector<DocId>& out) const;
  void decode_tfs(const SegmentView& seg, std::vector<std::uint32_t>& out) const;

  // Offsets from head along next pointers. Throws CorruptSegment on a cycle
  // or a non-increasing offset.
  std::vector<PoolOffset> chain(PoolOffset head) const;

  // Position returned for the next segment when no skip is needed.
  PoolOffset end() const { return end_; }
  std::uint64_t allocated_bytes() const { return blocks_.size() * options_.block_bytes; }
  const PoolStats& stats() const { return stats_; }
  const PoolOptions& options() const { return options_; }
  std::uint32_t block_size() const { return block_size_; }
  bool positional() const { return positional_; }

  // Bytes [0, end()) in order.
  void write_bytes(std::ostream& out) const;
  // Rebuilds a pool from bytes produced by write_bytes.
  static SegmentPool from_bytes(std::span<const std::uint8_t> bytes,
                                std::uint32_t block_size, bool positional,
                                PoolOptions options, PoolStats stats);

  const std::uint8_t* data_at(PoolOffset offset) const {
    return blocks_[offset / options_.block_bytes].get() + offset % options_.block_bytes;
  }

 private:
  struct Placement {
    PoolOffset offset;
    std::uint64_t padding;
    std::uint64_t waste;
  };

  Placement place(PoolOffset at, std::size_t size) const;
  void ensure_blocks(PoolOffset last_byte);
  std::uint8_t* mutable_at(PoolOffset offset) {
    return blocks_[offset / options_.block_bytes].get() + offset % options_.block_bytes;
  }
  void zero_range(PoolOffset from, PoolOffset to);

  std::uint32_t block_size_;
  bool positional_;
  PoolOptions options_;
  std::vector<std::unique_ptr<std::uint8_t[]>> blocks_;
  PoolOffset end_ = 0;
  PoolStats stats_;
  std::vector<std::uint8_t> scratch_;
  std::vector<std::uint32_t> gaps_;
};

}  // namespace incidx
