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

#include "incidx/config.hpp"

#include <charconv>

#include "incidx/codec.hpp"
#include "incidx/error.hpp"

namespace incidx {

void Config::validate() const {
  if (block_size < 1 || block_size > codec::kMaxBlockSize) {
    throw InvariantViolation("block size must be in 1.." +
                             std::to_string(codec::kMaxBlockSize));
  }
  // Larger caps would overflow the 32-bit posting counts of a flush group.
  if (cap_exponent > 16) throw InvariantViolation("cap exponent must be <= 16");
  if (df_threshold < 1) throw InvariantViolation("df threshold must be >= 1");
}

void PoolOptions::validate() const {
  if (block_bytes < kMinBlockBytes) {
    throw InvariantViolation("pool block size must be at least 1 MiB");
  }
  if (block_bytes % 8 != 0) throw InvariantViolation("pool block size must be a multiple of 8");
}

std::uint32_t parse_cap(const std::string& text) {
  auto bad = [&] {
    return InvariantViolation("cap must be one of 1b,2b,4b,...,128b or 0..7, got '" +
                              text + "'");
  };
  if (text.empty()) throw bad();
  std::string digits = text;
  const bool blocks = text.back() == 'b';
  if (blocks) digits.pop_back();
  std::uint32_t value = 0;
  const auto* first = digits.data();
  const auto* last = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || digits.empty()) throw bad();
  if (!blocks) {
    if (value > kMaxCapExponent) throw bad();
    return value;
  }
  for (std::uint32_t m = 0; m <= kMaxCapExponent; ++m) {
    if (value == (1u << m)) return m;
  }
  throw bad();
}

std::string cap_label(std::uint32_t cap_exponent) {
  return std::to_string(std::uint64_t{1} << cap_exponent) + "b";
}

}  // namespace incidx
