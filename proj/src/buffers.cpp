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

#include "incidx/buffers.hpp"

#include <algorithm>
#include <string>

#include "incidx/error.hpp"

namespace incidx {

std::uint64_t grow_schedule(std::uint32_t j, std::uint32_t cap_exponent,
                            std::uint32_t block_size) {
  return static_cast<std::uint64_t>(block_size) << std::min(j, cap_exponent);
}

BufferMaps::BufferMaps(const Config& config) : config_(config) {
  config_.validate();
  if (config_.df_threshold > config_.block_size) {
    throw InvariantViolation("df threshold must not exceed the block size");
  }
}

void BufferMaps::charge(std::int64_t docid, std::int64_t tf, std::int64_t pos) {
  current_.docid_bytes += static_cast<std::uint64_t>(docid);
  current_.tf_bytes += static_cast<std::uint64_t>(tf);
  current_.position_bytes += static_cast<std::uint64_t>(pos);
  peak_.docid_bytes = std::max(peak_.docid_bytes, current_.docid_bytes);
  peak_.tf_bytes = std::max(peak_.tf_bytes, current_.tf_bytes);
  peak_.position_bytes = std::max(peak_.position_bytes, current_.position_bytes);
}

void BufferMaps::resize_capacity(TermBuffers& buf, std::uint64_t capacity) {
  const auto delta = 4 * (static_cast<std::int64_t>(capacity) -
                          static_cast<std::int64_t>(buf.capacity));
  charge(delta, delta, 0);
  buf.capacity = capacity;
  buf.docids.reserve(capacity);
  buf.tfs.reserve(capacity);
}

void BufferMaps::grow_positions(TermBuffers& buf) {
  const std::uint64_t block = config_.block_size;
  while (buf.positions.size() > buf.position_capacity) {
    buf.position_capacity += block;
    charge(0, 0, static_cast<std::int64_t>(4 * block));
  }
}

void BufferMaps::activate(TermBuffers& buf) {
  buf.state = BufferState::kActive;
  resize_capacity(buf, config_.block_size);
  buf.max_capacity_exponent = 0;
  if (config_.positional) {
    // The prebuffer held positions at exact size; the active buffer grows in
    // whole blocks starting from one.
    const std::uint64_t block = config_.block_size;
    const std::uint64_t blocks =
        std::max<std::uint64_t>(1, (buf.positions.size() + block - 1) / block);
    const auto next = blocks * block;
    charge(0, 0, 4 * (static_cast<std::int64_t>(next) -
                      static_cast<std::int64_t>(buf.position_capacity)));
    buf.position_capacity = next;
    buf.positions.reserve(next);
  }
}

FlushRequest BufferMaps::take_flush(TermId id, TermBuffers& buf, bool final) {
  FlushRequest req;
  req.term_id = id;
  req.docids = std::move(buf.docids);
  req.tfs = std::move(buf.tfs);
  req.positions = std::move(buf.positions);
  req.capacity = buf.capacity;
  req.ordinal = buf.flushes;
  req.final = final;
  buf.docids = {};
  buf.tfs = {};
  buf.positions = {};

  const auto old_cap = static_cast<std::int64_t>(buf.capacity);
  const auto old_pos = static_cast<std::int64_t>(buf.position_capacity);
  charge(-4 * old_cap, -4 * old_cap, -4 * old_pos);
  buf.capacity = 0;
  buf.position_capacity = 0;
  if (final) return req;

  ++buf.flushes;
  resize_capacity(buf, grow_schedule(buf.flushes, config_.cap_exponent, config_.block_size));
  buf.max_capacity_exponent =
      std::max(buf.max_capacity_exponent, std::min(buf.flushes, config_.cap_exponent));
  if (config_.positional) {
    buf.position_capacity = config_.block_size;
    buf.positions.reserve(buf.position_capacity);
    charge(0, 0, 4 * static_cast<std::int64_t>(config_.block_size));
  }
  return req;
}

std::optional<FlushRequest> BufferMaps::insert(TermId term, DocId docid,
                                               std::uint32_t tf,
                                               std::span<const std::uint32_t> positions) {
  if (term >= terms_.size()) terms_.resize(static_cast<std::size_t>(term) + 1);
  TermBuffers& buf = terms_[term];

  if (buf.seen && docid <= buf.last_docid) {
    throw InvariantViolation("buffers: docid " + std::to_string(docid) +
                             " not greater than " + std::to_string(buf.last_docid) +
                             " for term " + std::to_string(term));
  }
  if (tf == 0) throw InvariantViolation("buffers: tf must be >= 1");
  if (config_.positional) {
    if (positions.size() != tf) {
      throw InvariantViolation("buffers: tf " + std::to_string(tf) + " but " +
                               std::to_string(positions.size()) + " positions");
    }
    std::uint32_t prev = 0;
    for (auto p : positions) {
      if (p <= prev) {
        throw InvariantViolation("buffers: positions must be >= 1 and strictly increasing");
      }
      prev = p;
    }
  }

  if (!buf.seen) {
    buf.seen = true;
    buf.capacity = config_.df_threshold;
    buf.docids.reserve(buf.capacity);
    buf.tfs.reserve(buf.capacity);
    charge(4 * static_cast<std::int64_t>(buf.capacity),
           4 * static_cast<std::int64_t>(buf.capacity), 0);
  }
  buf.last_docid = docid;
  buf.docids.push_back(docid);
  buf.tfs.push_back(tf);

  if (config_.positional) {
    buf.positions.insert(buf.positions.end(), positions.begin(), positions.end());
    if (buf.state == BufferState::kPrebuffer) {
      buf.position_capacity += tf;
      charge(0, 0, 4 * static_cast<std::int64_t>(tf));
    } else {
      grow_positions(buf);
    }
  }

  if (buf.state == BufferState::kPrebuffer && buf.docids.size() >= config_.df_threshold) {
    activate(buf);
  }
  if (buf.state == BufferState::kActive && buf.docids.size() == buf.capacity) {
    return take_flush(term, buf, false);
  }
  return std::nullopt;
}

std::vector<FlushRequest> BufferMaps::drain_all() {
  std::vector<FlushRequest> out;
  for (TermId id = 0; id < terms_.size(); ++id) {
    TermBuffers& buf = terms_[id];
    if (buf.state == BufferState::kActive && !buf.docids.empty()) {
      out.push_back(take_flush(id, buf, true));
      continue;
    }
    const auto cap = static_cast<std::int64_t>(buf.capacity);
    charge(-4 * cap, -4 * cap, -4 * static_cast<std::int64_t>(buf.position_capacity));
    buf.capacity = 0;
    buf.position_capacity = 0;
    buf.docids = {};
    buf.tfs = {};
    buf.positions = {};
  }
  return out;
}

std::vector<std::uint64_t> BufferMaps::buffer_length_histogram() const {
  std::vector<std::uint64_t> counts(config_.cap_exponent + 1, 0);
  for (const auto& buf : terms_) {
    if (buf.state == BufferState::kActive) ++counts[buf.max_capacity_exponent];
  }
  return counts;
}

}  // namespace incidx
