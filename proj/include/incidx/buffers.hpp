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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "incidx/config.hpp"
#include "incidx/dictionary.hpp"

namespace incidx {

// Bytes held by buffer maps, by category. Every buffered integer is 32 bits.
struct BufferMemory {
  std::uint64_t docid_bytes = 0;
  std::uint64_t tf_bytes = 0;
  std::uint64_t position_bytes = 0;

  std::uint64_t total() const { return docid_bytes + tf_bytes + position_bytes; }

  friend bool operator==(const BufferMemory&, const BufferMemory&) = default;
};

// Postings handed from the buffer maps to the segment pool. positions is the
// flat concatenation of every document's positions (empty when the index is
// not positional).
struct FlushRequest {
  TermId term_id = 0;
  std::vector<DocId> docids;
  std::vector<std::uint32_t> tfs;
  std::vector<std::uint32_t> positions;
  // Docid buffer capacity at the time of the flush.
  std::uint64_t capacity = 0;
  // Number of earlier flushes of this term.
  std::uint32_t ordinal = 0;
  // Emitted by drain_all; may be shorter than capacity.
  bool final = false;
};

enum class BufferState : std::uint8_t { kPrebuffer, kActive };

// Per-term accumulation. While in kPrebuffer the same arrays act as the small
// df-threshold sized prebuffer; activation only changes the capacity.
struct TermBuffers {
  BufferState state = BufferState::kPrebuffer;
  std::vector<DocId> docids;
  std::vector<std::uint32_t> tfs;
  std::vector<std::uint32_t> positions;
  std::uint64_t capacity = 0;
  std::uint64_t position_capacity = 0;
  std::uint32_t flushes = 0;
  // Largest j for which a buffer of 2^j * block_size was allocated.
  std::uint32_t max_capacity_exponent = 0;
  bool seen = false;
  DocId last_docid = 0;
};

// Capacity of the buffer allocated after j flushes: B * 2^min(j, m).
std::uint64_t grow_schedule(std::uint32_t j, std::uint32_t cap_exponent,
                            std::uint32_t block_size);

// Dense per-term buffer table indexed by term id.
class BufferMaps {
 public:
  explicit BufferMaps(const Config& config);

  // Appends a posting. Returns a flush request when the term's docid buffer
  // fills. Throws InvariantViolation on a non-increasing docid, tf == 0, or
  // (positional) positions that are not tf strictly increasing values >= 1.
  std::optional<FlushRequest> insert(TermId term, DocId docid, std::uint32_t tf,
                                     std::span<const std::uint32_t> positions);

  // Final partial flushes of every active term in term id order. Prebuffered
  // terms are dropped. Releases all buffer memory.
  std::vector<FlushRequest> drain_all();

  BufferMemory peak_memory_report() const { return peak_; }
  BufferMemory current_memory() const { return current_; }

  std::size_t size() const { return terms_.size(); }
  const TermBuffers& term(TermId id) const { return terms_[id]; }
  bool retained(TermId id) const {
    return id < terms_.size() && terms_[id].state == BufferState::kActive;
  }

  // Entry j counts retained terms whose largest buffer was 2^j * block_size.
  std::vector<std::uint64_t> buffer_length_histogram() const;

  const Config& config() const { return config_; }

 private:
  void activate(TermBuffers& buf);
  FlushRequest take_flush(TermId id, TermBuffers& buf, bool final);
  void resize_capacity(TermBuffers& buf, std::uint64_t capacity);
  void grow_positions(TermBuffers& buf);
  void charge(std::int64_t docid, std::int64_t tf, std::int64_t pos);

  Config config_;
  std::vector<TermBuffers> terms_;
  BufferMemory current_;
  BufferMemory peak_;
};

}  // namespace incidx
