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

// Block integer codec.
//
// Every block is encoded with a frame-of-reference bit width w and a list of
// exceptions (values that need more than w bits). Sorted docids are gapped
// before encoding (PForDelta); tfs are encoded raw and positions are gapped
// within each document (PFor).
//
// Payload layout, all multi-byte fields little-endian:
//
//   u8  w                 bit width, 0..32
//   u8  exception_count
//   u16 count             number of values, 1..block size
//   u32 words[ceil(count * w / 32)]   low w bits of each value, LSB first
//   { u8 index, u32 value } x exception_count
//
// Exceptions carry the full original value, so decoding overwrites the packed
// slot instead of patching high bits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace incidx::codec {

inline constexpr std::uint32_t kDefaultBlockSize = 128;
// Exception indices are one byte wide.
inline constexpr std::uint32_t kMaxBlockSize = 256;
inline constexpr std::size_t kBlockHeaderBytes = 4;
inline constexpr std::size_t kExceptionBytes = 5;
inline constexpr std::uint32_t kMaxExceptions = 255;

struct BlockHeader {
  std::uint8_t bit_width = 0;
  std::uint8_t exception_count = 0;
  std::uint16_t count = 0;
};

struct EncodedBlock {
  std::vector<std::uint8_t> payload;

  std::uint32_t byte_length() const {
    return static_cast<std::uint32_t>(payload.size());
  }
};

// Picks the bit width for values: the cheapest width (in encoded bytes) among
// those leaving at most 10% of the values as exceptions and at most 255
// exceptions in total. Ties go to the smaller width.
std::uint8_t choose_bit_width(std::span<const std::uint32_t> values);

// Encoded size of values at the width choose_bit_width would pick.
std::size_t encoded_size(std::span<const std::uint32_t> values);

// Appends the encoding of values to out and returns the number of bytes
// written. values must hold 1..kMaxBlockSize entries.
std::size_t encode_block_into(std::span<const std::uint32_t> values,
                              std::vector<std::uint8_t>& out);

EncodedBlock encode_block(std::span<const std::uint32_t> values);

// Parses the 4-byte header. Throws CorruptSegment if payload is too short.
BlockHeader read_header(std::span<const std::uint8_t> payload);

// Decodes payload into out (resized to the element count). Throws
// CorruptSegment on a zero or oversized element count, a bit width above 32,
// a byte length that disagrees with the header, or an exception index past
// the element count.
void decode_block_into(std::span<const std::uint8_t> payload,
                       std::uint32_t block_size, std::vector<std::uint32_t>& out);

std::vector<std::uint32_t> decode_block(
    const EncodedBlock& encoded, std::uint32_t block_size = kDefaultBlockSize);

// First value absolute, then differences. Throws InvariantViolation unless
// sorted is non-empty and strictly increasing.
std::vector<std::uint32_t> gap_encode(std::span<const std::uint32_t> sorted);
void gap_encode_into(std::span<const std::uint32_t> sorted,
                     std::vector<std::uint32_t>& out);

// Prefix sum. Throws CorruptSegment on a zero gap after the first entry or on
// 32-bit overflow.
std::vector<std::uint32_t> gap_decode(std::span<const std::uint32_t> gaps);
void gap_decode_in_place(std::span<std::uint32_t> values);

using PerDocPositions = std::vector<std::vector<std::uint32_t>>;

// Gaps positions within each document; the first position of every document
// stays absolute. Throws InvariantViolation on an empty document, a zero
// position, or a non-increasing run.
std::vector<std::uint32_t> position_gap_encode(const PerDocPositions& per_doc);

// Same, over a flat positions array split by tfs.
void position_gap_encode_into(std::span<const std::uint32_t> flat_positions,
                              std::span<const std::uint32_t> tfs,
                              std::vector<std::uint32_t>& out);

// Inverse of position_gap_encode. Throws CorruptSegment when the tfs do not
// sum to the number of gaps, a tf is zero, or a gap is zero.
PerDocPositions position_gap_decode(std::span<const std::uint32_t> flat_gaps,
                                    std::span<const std::uint32_t> tfs);
void position_gap_decode_in_place(std::span<std::uint32_t> flat,
                                  std::span<const std::uint32_t> tfs);

}  // namespace incidx::codec
