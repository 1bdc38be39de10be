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

#include "incidx/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#include "incidx/bytes.hpp"
#include "incidx/error.hpp"

namespace incidx::codec {
namespace {

std::size_t packed_words(std::size_t count, unsigned width) {
  return (count * width + 31) / 32;
}

std::size_t cost(std::size_t count, unsigned width, std::size_t exceptions) {
  return kBlockHeaderBytes + 4 * packed_words(count, width) +
         kExceptionBytes * exceptions;
}

void check_count(std::size_t count) {
  if (count == 0 || count > kMaxBlockSize) {
    throw InvariantViolation("block must hold 1.." +
                             std::to_string(kMaxBlockSize) + " values, got " +
                             std::to_string(count));
  }
}

struct WidthChoice {
  unsigned width;
  std::size_t exceptions;
};

WidthChoice choose(std::span<const std::uint32_t> values) {
  check_count(values.size());
  // by_width[b] = number of values whose bit length is exactly b
  std::array<std::size_t, 33> by_width{};
  for (auto v : values) ++by_width[std::bit_width(v)];

  const std::size_t n = values.size();
  // exceptions at width w: values whose bit length exceeds w
  std::size_t above = n - by_width[0];
  WidthChoice best{32, 0};
  std::size_t best_cost = cost(n, 32, 0);
  for (unsigned w = 0; w <= 32; ++w) {
    if (w > 0) above -= by_width[w];
    if (above * 10 > n || above > kMaxExceptions) continue;
    const auto c = cost(n, w, above);
    if (c < best_cost) {
      best_cost = c;
      best = {w, above};
    }
  }
  return best;
}

void check_payload(bool ok, const char* what) {
  if (!ok) throw CorruptSegment(std::string("block: ") + what);
}

}  // namespace

std::uint8_t choose_bit_width(std::span<const std::uint32_t> values) {
  return static_cast<std::uint8_t>(choose(values).width);
}

std::size_t encoded_size(std::span<const std::uint32_t> values) {
  const auto c = choose(values);
  return cost(values.size(), c.width, c.exceptions);
}

std::size_t encode_block_into(std::span<const std::uint32_t> values,
                              std::vector<std::uint8_t>& out) {
  const auto [width, exceptions] = choose(values);
  const std::size_t n = values.size();
  const std::size_t words = packed_words(n, width);
  const std::size_t total = cost(n, width, exceptions);

  const std::size_t start = out.size();
  out.resize(start + total, 0);
  std::uint8_t* dst = out.data() + start;
  dst[0] = static_cast<std::uint8_t>(width);
  dst[1] = static_cast<std::uint8_t>(exceptions);
  bytes::put_u16(dst + 2, static_cast<std::uint16_t>(n));

  std::uint8_t* packed = dst + kBlockHeaderBytes;
  std::uint8_t* exc = packed + 4 * words;
  if (width > 0) {
    const std::uint64_t mask =
        width == 32 ? 0xFFFFFFFFull : ((std::uint64_t{1} << width) - 1);
    std::uint64_t acc = 0;
    unsigned filled = 0;
    std::size_t word = 0;
    for (auto v : values) {
      acc |= (v & mask) << filled;
      filled += width;
      if (filled >= 32) {
        bytes::put_u32(packed + 4 * word++, static_cast<std::uint32_t>(acc));
        acc >>= 32;
        filled -= 32;
      }
    }
    if (filled > 0) bytes::put_u32(packed + 4 * word, static_cast<std::uint32_t>(acc));
  }
  if (exceptions > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<unsigned>(std::bit_width(values[i])) > width) {
        exc[0] = static_cast<std::uint8_t>(i);
        bytes::put_u32(exc + 1, values[i]);
        exc += kExceptionBytes;
      }
    }
  }
  return total;
}

EncodedBlock encode_block(std::span<const std::uint32_t> values) {
  EncodedBlock block;
  encode_block_into(values, block.payload);
  return block;
}

BlockHeader read_header(std::span<const std::uint8_t> payload) {
  check_payload(payload.size() >= kBlockHeaderBytes, "shorter than header");
  return {payload[0], payload[1], bytes::get_u16(payload.data() + 2)};
}

void decode_block_into(std::span<const std::uint8_t> payload,
                       std::uint32_t block_size, std::vector<std::uint32_t>& out) {
  const auto header = read_header(payload);
  const unsigned width = header.bit_width;
  const std::size_t n = header.count;
  check_payload(n != 0, "element count is zero");
  check_payload(n <= block_size, "element count exceeds block size");
  check_payload(width <= 32, "bit width above 32");
  const std::size_t words = packed_words(n, width);
  check_payload(payload.size() == cost(n, width, header.exception_count),
                "byte length disagrees with header");

  out.resize(n);
  const std::uint8_t* packed = payload.data() + kBlockHeaderBytes;
  if (width == 0) {
    std::fill(out.begin(), out.end(), 0u);
  } else {
    const std::uint64_t mask =
        width == 32 ? 0xFFFFFFFFull : ((std::uint64_t{1} << width) - 1);
    std::uint64_t acc = 0;
    unsigned avail = 0;
    std::size_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (avail < width) {
        acc |= static_cast<std::uint64_t>(bytes::get_u32(packed + 4 * word++)) << avail;
        avail += 32;
      }
      out[i] = static_cast<std::uint32_t>(acc & mask);
      acc >>= width;
      avail -= width;
    }
  }
  const std::uint8_t* exc = packed + 4 * words;
  for (unsigned e = 0; e < header.exception_count; ++e, exc += kExceptionBytes) {
    const std::size_t at = exc[0];
    check_payload(at < n, "exception index past element count");
    out[at] = bytes::get_u32(exc + 1);
  }
}

std::vector<std::uint32_t> decode_block(const EncodedBlock& encoded,
                                        std::uint32_t block_size) {
  std::vector<std::uint32_t> out;
  decode_block_into(encoded.payload, block_size, out);
  return out;
}

void gap_encode_into(std::span<const std::uint32_t> sorted,
                     std::vector<std::uint32_t>& out) {
  if (sorted.empty()) throw InvariantViolation("gap_encode: empty input");
  out.resize(sorted.size());
  out[0] = sorted[0];
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] <= sorted[i - 1]) {
      throw InvariantViolation("gap_encode: input not strictly increasing at " +
                               std::to_string(i));
    }
    out[i] = sorted[i] - sorted[i - 1];
  }
}

std::vector<std::uint32_t> gap_encode(std::span<const std::uint32_t> sorted) {
  std::vector<std::uint32_t> out;
  gap_encode_into(sorted, out);
  return out;
}

void gap_decode_in_place(std::span<std::uint32_t> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] == 0) throw CorruptSegment("zero docid gap at " + std::to_string(i));
    const std::uint32_t next = values[i - 1] + values[i];
    if (next < values[i - 1]) throw CorruptSegment("docid gap overflows 32 bits");
    values[i] = next;
  }
}

std::vector<std::uint32_t> gap_decode(std::span<const std::uint32_t> gaps) {
  std::vector<std::uint32_t> out(gaps.begin(), gaps.end());
  gap_decode_in_place(out);
  return out;
}

void position_gap_encode_into(std::span<const std::uint32_t> flat_positions,
                              std::span<const std::uint32_t> tfs,
                              std::vector<std::uint32_t>& out) {
  out.resize(flat_positions.size());
  std::size_t at = 0;
  for (std::size_t d = 0; d < tfs.size(); ++d) {
    const std::uint32_t tf = tfs[d];
    if (tf == 0) throw InvariantViolation("position_gap_encode: empty document");
    if (at + tf > flat_positions.size()) {
      throw InvariantViolation("position_gap_encode: tfs exceed positions");
    }
    std::uint32_t prev = 0;
    for (std::uint32_t i = 0; i < tf; ++i, ++at) {
      const std::uint32_t p = flat_positions[at];
      if (p <= prev) {
        throw InvariantViolation(
            "position_gap_encode: positions must be >= 1 and strictly increasing");
      }
      out[at] = p - prev;
      prev = p;
    }
  }
  if (at != flat_positions.size()) {
    throw InvariantViolation("position_gap_encode: tfs do not cover positions");
  }
}

std::vector<std::uint32_t> position_gap_encode(const PerDocPositions& per_doc) {
  std::vector<std::uint32_t> flat;
  std::vector<std::uint32_t> tfs;
  tfs.reserve(per_doc.size());
  for (const auto& doc : per_doc) {
    flat.insert(flat.end(), doc.begin(), doc.end());
    tfs.push_back(static_cast<std::uint32_t>(doc.size()));
  }
  std::vector<std::uint32_t> out;
  position_gap_encode_into(flat, tfs, out);
  return out;
}

void position_gap_decode_in_place(std::span<std::uint32_t> flat,
                                  std::span<const std::uint32_t> tfs) {
  std::uint64_t total = 0;
  for (auto tf : tfs) {
    if (tf == 0) throw CorruptSegment("zero term frequency");
    total += tf;
  }
  if (total != flat.size()) {
    throw CorruptSegment("term frequencies sum to " + std::to_string(total) +
                         " but " + std::to_string(flat.size()) +
                         " positions are present");
  }
  std::size_t at = 0;
  for (auto tf : tfs) {
    std::uint32_t prev = 0;
    for (std::uint32_t i = 0; i < tf; ++i, ++at) {
      if (flat[at] == 0) throw CorruptSegment("zero position gap");
      const std::uint32_t p = prev + flat[at];
      if (p < prev) throw CorruptSegment("position overflows 32 bits");
      flat[at] = p;
      prev = p;
    }
  }
}

PerDocPositions position_gap_decode(std::span<const std::uint32_t> flat_gaps,
                                    std::span<const std::uint32_t> tfs) {
  std::vector<std::uint32_t> flat(flat_gaps.begin(), flat_gaps.end());
  position_gap_decode_in_place(flat, tfs);
  PerDocPositions out;
  out.reserve(tfs.size());
  std::size_t at = 0;
  for (auto tf : tfs) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(at),
                     flat.begin() + static_cast<std::ptrdiff_t>(at + tf));
    at += tf;
  }
  return out;
}

}  // namespace incidx::codec
