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

// Little-endian scalar helpers shared by the block codec, the segment pool
// and the index file reader/writer.

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

namespace incidx::bytes {

inline void put_u16(std::uint8_t* dst, std::uint16_t v) {
  dst[0] = static_cast<std::uint8_t>(v);
  dst[1] = static_cast<std::uint8_t>(v >> 8);
}

inline void put_u32(std::uint8_t* dst, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) dst[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline void put_u64(std::uint8_t* dst, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint16_t get_u16(const std::uint8_t* src) {
  return static_cast<std::uint16_t>(src[0] | (src[1] << 8));
}

inline std::uint32_t get_u32(const std::uint8_t* src) {
  return static_cast<std::uint32_t>(src[0]) |
         (static_cast<std::uint32_t>(src[1]) << 8) |
         (static_cast<std::uint32_t>(src[2]) << 16) |
         (static_cast<std::uint32_t>(src[3]) << 24);
}

inline std::uint64_t get_u64(const std::uint8_t* src) {
  return static_cast<std::uint64_t>(get_u32(src)) |
         (static_cast<std::uint64_t>(get_u32(src + 4)) << 32);
}

inline void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  const auto at = out.size();
  out.resize(at + 2);
  put_u16(out.data() + at, v);
}

inline void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  const auto at = out.size();
  out.resize(at + 4);
  put_u32(out.data() + at, v);
}

inline void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  const auto at = out.size();
  out.resize(at + 8);
  put_u64(out.data() + at, v);
}

}  // namespace incidx::bytes
