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

#include "incidx/pool.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>
#include <string>

#include "incidx/bytes.hpp"
#include "incidx/error.hpp"

namespace incidx {
namespace {

constexpr PoolOffset align_up(PoolOffset at) {
  return (at + kSegmentAlignment - 1) & ~PoolOffset{kSegmentAlignment - 1};
}

// Appends u32 length + block for values.
void append_block(std::span<const std::uint32_t> values, std::vector<std::uint8_t>& out) {
  const auto len_at = out.size();
  out.resize(len_at + 4);
  const auto len = codec::encode_block_into(values, out);
  bytes::put_u32(out.data() + len_at, static_cast<std::uint32_t>(len));
}

[[noreturn]] void corrupt(PoolOffset offset, const std::string& what) {
  throw CorruptSegment("segment at " + std::to_string(offset) + ": " + what);
}

}  // namespace

codec::PerDocPositions DecodedSegment::per_doc_positions() const {
  codec::PerDocPositions out;
  if (positions.empty()) return out;
  out.reserve(tfs.size());
  std::size_t at = 0;
  for (auto tf : tfs) {
    out.emplace_back(positions.begin() + static_cast<std::ptrdiff_t>(at),
                     positions.begin() + static_cast<std::ptrdiff_t>(at + tf));
    at += tf;
  }
  return out;
}

void encode_segment(std::span<const DocId> docids, std::span<const std::uint32_t> tfs,
                    std::span<const std::uint32_t> positions, bool positional,
                    std::uint32_t block_size, std::vector<std::uint8_t>& out) {
  if (docids.empty() || docids.size() > block_size || tfs.size() != docids.size()) {
    throw InvariantViolation("segment must hold 1..block_size postings with one tf each");
  }
  bytes::append_u64(out, kNoOffset);
  bytes::append_u32(out, static_cast<std::uint32_t>(docids.size()));

  std::vector<std::uint32_t> scratch;
  codec::gap_encode_into(docids, scratch);
  append_block(scratch, out);
  append_block(tfs, out);
  if (!positional) return;

  codec::position_gap_encode_into(positions, tfs, scratch);
  const std::size_t n = scratch.size();
  const auto blocks = static_cast<std::uint32_t>((n + block_size - 1) / block_size);
  bytes::append_u32(out, blocks);
  for (std::size_t at = 0; at < n; at += block_size) {
    const auto len = std::min<std::size_t>(block_size, n - at);
    append_block(std::span(scratch).subspan(at, len), out);
  }
}

SegmentPool::SegmentPool(std::uint32_t block_size, bool positional, PoolOptions options)
    : block_size_(block_size), positional_(positional), options_(options) {
  options_.validate();
  if (block_size_ < 1 || block_size_ > codec::kMaxBlockSize) {
    throw InvariantViolation("pool: invalid block size");
  }
}

SegmentPool::Placement SegmentPool::place(PoolOffset at, std::size_t size) const {
  const std::uint64_t blk = options_.block_bytes;
  if (size > blk) {
    throw CapacityError("segment of " + std::to_string(size) +
                        " bytes exceeds the pool allocation block");
  }
  const PoolOffset aligned = align_up(at);
  if (aligned % blk + size <= blk) return {aligned, aligned - at, 0};
  const PoolOffset next_block = (aligned / blk + 1) * blk;
  return {next_block, aligned - at, next_block - aligned};
}

void SegmentPool::ensure_blocks(PoolOffset last_byte) {
  const std::uint64_t blk = options_.block_bytes;
  while (blocks_.size() * blk <= last_byte) {
    blocks_.push_back(std::make_unique_for_overwrite<std::uint8_t[]>(blk));
  }
}

void SegmentPool::zero_range(PoolOffset from, PoolOffset to) {
  for (PoolOffset at = from; at < to; ++at) *mutable_at(at) = 0;
}

AppendResult SegmentPool::append_segments(const FlushRequest& flush, PoolOffset tail) {
  const std::size_t n = flush.docids.size();
  if (n == 0 || flush.tfs.size() != n) {
    throw InvariantViolation("append_segments: flush needs docids with matching tfs");
  }
  if (tail != kNoOffset && tail >= end_) {
    throw InvariantViolation("append_segments: tail offset outside the pool");
  }

  // Encode the whole group first so a capacity failure leaves no trace.
  scratch_.clear();
  std::vector<std::size_t> starts;
  std::size_t pos_at = 0;
  for (std::size_t at = 0; at < n; at += block_size_) {
    const auto len = std::min<std::size_t>(block_size_, n - at);
    const auto tfs = std::span(flush.tfs).subspan(at, len);
    std::span<const std::uint32_t> positions;
    if (positional_) {
      std::size_t total = 0;
      for (auto tf : tfs) total += tf;
      if (pos_at + total > flush.positions.size()) {
        throw InvariantViolation("append_segments: fewer positions than tfs require");
      }
      positions = std::span(flush.positions).subspan(pos_at, total);
      pos_at += total;
    }
    starts.push_back(scratch_.size());
    encode_segment(std::span(flush.docids).subspan(at, len), tfs, positions, positional_,
                   block_size_, scratch_);
  }
  if (positional_ && pos_at != flush.positions.size()) {
    throw InvariantViolation("append_segments: more positions than tfs require");
  }
  starts.push_back(scratch_.size());

  std::vector<Placement> placements;
  placements.reserve(starts.size() - 1);
  PoolOffset cursor = end_;
  for (std::size_t i = 0; i + 1 < starts.size(); ++i) {
    const auto size = starts[i + 1] - starts[i];
    placements.push_back(place(cursor, size));
    cursor = placements.back().offset + size;
  }
  const std::uint64_t blk = options_.block_bytes;
  const std::uint64_t blocks_needed = (cursor + blk - 1) / blk;
  if (blocks_needed * blk > options_.memory_budget) {
    throw CapacityError("segment pool budget of " + std::to_string(options_.memory_budget) +
                        " bytes exhausted");
  }
  ensure_blocks(cursor - 1);

  AppendResult result;
  result.segments.reserve(placements.size());
  PoolOffset written = end_;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& p = placements[i];
    const auto size = starts[i + 1] - starts[i];
    zero_range(written, p.offset);
    std::uint8_t* dst = mutable_at(p.offset);
    std::memcpy(dst, scratch_.data() + starts[i], size);
    const PoolOffset next =
        i + 1 < placements.size() ? placements[i + 1].offset : kNoOffset;
    bytes::put_u64(dst, next);
    written = p.offset + size;
    result.segments.push_back(p.offset);

    ++stats_.segments;
    stats_.segment_bytes += size;
    stats_.padding_bytes += p.padding;
    stats_.block_waste_bytes += p.waste;
  }
  end_ = written;
  if (tail != kNoOffset) patch_next(tail, result.segments.front());
  result.first = result.segments.front();
  result.tail = result.segments.back();
  return result;
}

PoolOffset SegmentPool::append_raw(std::span<const std::uint8_t> segment, PoolOffset next) {
  if (segment.size() < kSegmentHeaderBytes) {
    throw InvariantViolation("append_raw: segment shorter than its header");
  }
  const auto p = place(end_, segment.size());
  const PoolOffset last = p.offset + segment.size() - 1;
  const std::uint64_t blk = options_.block_bytes;
  if ((last / blk + 1) * blk > options_.memory_budget) {
    throw CapacityError("segment pool budget of " + std::to_string(options_.memory_budget) +
                        " bytes exhausted");
  }
  ensure_blocks(last);
  zero_range(end_, p.offset);
  std::uint8_t* dst = mutable_at(p.offset);
  std::memcpy(dst, segment.data(), segment.size());
  bytes::put_u64(dst, next);
  end_ = p.offset + segment.size();
  ++stats_.segments;
  stats_.segment_bytes += segment.size();
  stats_.padding_bytes += p.padding;
  stats_.block_waste_bytes += p.waste;
  return p.offset;
}

std::vector<PoolOffset> SegmentPool::reserve_segments(std::span<const std::size_t> sizes) {
  std::vector<Placement> placements;
  placements.reserve(sizes.size());
  PoolOffset cursor = end_;
  for (auto size : sizes) {
    if (size < kSegmentHeaderBytes) {
      throw InvariantViolation("reserve_segments: segment shorter than its header");
    }
    placements.push_back(place(cursor, size));
    cursor = placements.back().offset + size;
  }
  if (sizes.empty()) return {};
  const std::uint64_t blk = options_.block_bytes;
  if ((cursor + blk - 1) / blk * blk > options_.memory_budget) {
    throw CapacityError("segment pool budget of " + std::to_string(options_.memory_budget) +
                        " bytes exhausted");
  }
  ensure_blocks(cursor - 1);

  std::vector<PoolOffset> offsets;
  offsets.reserve(sizes.size());
  PoolOffset written = end_;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    zero_range(written, placements[i].offset);
    written = placements[i].offset + sizes[i];
    offsets.push_back(placements[i].offset);
    ++stats_.segments;
    stats_.segment_bytes += sizes[i];
    stats_.padding_bytes += placements[i].padding;
    stats_.block_waste_bytes += placements[i].waste;
  }
  end_ = written;
  return offsets;
}

void SegmentPool::write_reserved(PoolOffset offset, std::span<const std::uint8_t> segment,
                                 PoolOffset next) {
  std::uint8_t* dst = mutable_at(offset);
  std::memcpy(dst, segment.data(), segment.size());
  bytes::put_u64(dst, next);
}

void SegmentPool::patch_next(PoolOffset offset, PoolOffset next) {
  if (offset % kSegmentAlignment != 0 || offset + kSegmentHeaderBytes > end_) {
    throw InvariantViolation("patch_next: offset does not address a segment");
  }
  bytes::put_u64(mutable_at(offset), next);
}

SegmentView SegmentPool::view(PoolOffset offset) const {
  if (offset == kNoOffset) corrupt(offset, "null offset");
  if (offset % kSegmentAlignment != 0) corrupt(offset, "misaligned");
  if (offset >= end_ || end_ - offset < kSegmentHeaderBytes) corrupt(offset, "past pool end");
  const std::uint64_t blk = options_.block_bytes;
  const std::uint64_t limit = std::min<std::uint64_t>(end_, (offset / blk + 1) * blk) - offset;

  const std::uint8_t* base = data_at(offset);
  SegmentView seg;
  seg.offset = offset;
  seg.next = bytes::get_u64(base);
  seg.posting_count = bytes::get_u32(base + 8);
  if (seg.posting_count == 0 || seg.posting_count > block_size_) {
    corrupt(offset, "posting count " + std::to_string(seg.posting_count));
  }
  if (seg.next != kNoOffset && (seg.next <= offset || seg.next >= end_)) {
    corrupt(offset, "next pointer out of range");
  }

  std::size_t at = kSegmentHeaderBytes;
  auto take_block = [&]() -> std::span<const std::uint8_t> {
    if (limit - at < 4) corrupt(offset, "block length past segment bounds");
    const std::uint32_t len = bytes::get_u32(base + at);
    at += 4;
    if (limit - at < len) corrupt(offset, "block past segment bounds");
    std::span<const std::uint8_t> block(base + at, len);
    at += len;
    return block;
  };
  seg.docids = take_block();
  seg.tfs = take_block();
  if (positional_) {
    if (limit - at < 4) corrupt(offset, "missing position block count");
    seg.position_blocks = bytes::get_u32(base + at);
    at += 4;
    const std::size_t region = at;
    for (std::uint32_t i = 0; i < seg.position_blocks; ++i) take_block();
    seg.positions = std::span(base + region, at - region);
  }
  seg.byte_length = at;
  return seg;
}

void SegmentPool::decode_docids(const SegmentView& seg, std::vector<DocId>& out) const {
  codec::decode_block_into(seg.docids, block_size_, out);
  if (out.size() != seg.posting_count) corrupt(seg.offset, "docid block length mismatch");
  codec::gap_decode_in_place(out);
}

void SegmentPool::decode_tfs(const SegmentView& seg, std::vector<std::uint32_t>& out) const {
  codec::decode_block_into(seg.tfs, block_size_, out);
  if (out.size() != seg.posting_count) corrupt(seg.offset, "tf block length mismatch");
}

void SegmentPool::read_segment(PoolOffset offset, DecodedSegment& out) const {
  const auto seg = view(offset);
  out.next = seg.next;
  decode_docids(seg, out.docids);
  decode_tfs(seg, out.tfs);
  out.positions.clear();
  if (!positional_) return;

  std::vector<std::uint32_t> block;
  std::size_t at = 0;
  for (std::uint32_t i = 0; i < seg.position_blocks; ++i) {
    const std::uint32_t len = bytes::get_u32(seg.positions.data() + at);
    codec::decode_block_into(seg.positions.subspan(at + 4, len), block_size_, block);
    out.positions.insert(out.positions.end(), block.begin(), block.end());
    at += 4 + len;
  }
  codec::position_gap_decode_in_place(out.positions, out.tfs);
}

DecodedSegment SegmentPool::read_segment(PoolOffset offset) const {
  DecodedSegment out;
  read_segment(offset, out);
  return out;
}

std::vector<PoolOffset> SegmentPool::chain(PoolOffset head) const {
  std::vector<PoolOffset> out;
  for (PoolOffset at = head; at != kNoOffset;) {
    if (!out.empty() && at <= out.back()) corrupt(at, "chain offsets not increasing");
    out.push_back(at);
    at = view(at).next;
  }
  return out;
}

void SegmentPool::write_bytes(std::ostream& out) const {
  const std::uint64_t blk = options_.block_bytes;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const std::uint64_t start = b * blk;
    if (start >= end_) break;
    const auto len = std::min<std::uint64_t>(blk, end_ - start);
    out.write(reinterpret_cast<const char*>(blocks_[b].get()),
              static_cast<std::streamsize>(len));
  }
}

SegmentPool SegmentPool::from_bytes(std::span<const std::uint8_t> bytes,
                                    std::uint32_t block_size, bool positional,
                                    PoolOptions options, PoolStats stats) {
  SegmentPool pool(block_size, positional, options);
  if (!bytes.empty()) {
    pool.ensure_blocks(bytes.size() - 1);
    const std::uint64_t blk = options.block_bytes;
    for (std::size_t b = 0; b * blk < bytes.size(); ++b) {
      const auto len = std::min<std::uint64_t>(blk, bytes.size() - b * blk);
      std::memcpy(pool.blocks_[b].get(), bytes.data() + b * blk, len);
    }
  }
  pool.end_ = bytes.size();
  pool.stats_ = stats;
  return pool;
}

}  // namespace incidx
