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
#include <limits>
#include <string>

namespace incidx {

// Indexing parameters shared by buffers, pool and indexer.
struct Config {
  // Postings per compressed segment (b). At most 256: exception indices are
  // one byte wide.
  std::uint32_t block_size = 128;
  // Docid/tf buffers are capped at 2^cap_exponent * block_size postings.
  std::uint32_t cap_exponent = 5;
  // Terms seen in fewer documents are dropped at finalize.
  std::uint32_t df_threshold = 10;
  bool positional = true;

  std::uint64_t cap_postings() const {
    return static_cast<std::uint64_t>(block_size) << cap_exponent;
  }

  // Throws InvariantViolation when a field is out of range.
  void validate() const;

  friend bool operator==(const Config&, const Config&) = default;
};

struct PoolOptions {
  static constexpr std::uint64_t kMinBlockBytes = std::uint64_t{1} << 20;
  static constexpr std::uint64_t kDefaultBlockBytes = std::uint64_t{256} << 20;

  std::uint64_t block_bytes = kDefaultBlockBytes;
  // Upper bound on allocated pool bytes; exceeded appends throw CapacityError.
  std::uint64_t memory_budget = std::numeric_limits<std::uint64_t>::max();

  void validate() const;

  friend bool operator==(const PoolOptions&, const PoolOptions&) = default;
};

// "1b".."128b" or a bare exponent "0".."7". Throws InvariantViolation.
std::uint32_t parse_cap(const std::string& text);
std::string cap_label(std::uint32_t cap_exponent);

inline constexpr std::uint32_t kMaxCapExponent = 7;

}  // namespace incidx
