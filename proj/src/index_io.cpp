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

#include "incidx/index_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "incidx/bytes.hpp"
#include "incidx/error.hpp"

namespace incidx {
namespace {

constexpr char kMagic[8] = {'I', 'N', 'C', 'I', 'D', 'X', '\0', '\0'};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (data_.size() - at_ < n) throw FileFormatError("index file truncated");
    auto out = data_.subspan(at_, n);
    at_ += n;
    return out;
  }
  std::uint16_t u16() { return bytes::get_u16(take(2).data()); }
  std::uint32_t u32() { return bytes::get_u32(take(4).data()); }
  std::uint64_t u64() { return bytes::get_u64(take(8).data()); }
  bool done() const { return at_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t at_ = 0;
};

}  // namespace

CompactResult compact(const SegmentPool& pool, const Lexicon& lexicon,
                      PoolOptions options) {
  SegmentPool out(pool.block_size(), pool.positional(), options);
  std::vector<TermEntry> entries = lexicon.entries();
  for (auto& entry : entries) {
    PoolOffset prev = kNoOffset;
    for (PoolOffset at = entry.head; at != kNoOffset;) {
      const auto seg = pool.view(at);
      const PoolOffset copied =
          out.append_raw(std::span(pool.data_at(at), seg.byte_length), kNoOffset);
      if (prev == kNoOffset) {
        entry.head = copied;
      } else {
        out.patch_next(prev, copied);
      }
      prev = copied;
      at = seg.next;
    }
    entry.tail = prev;
  }
  return {std::move(out), Lexicon(std::move(entries))};
}

Index compact_index(const Index& index, PoolOptions options) {
  auto [pool, lexicon] = compact(index.pool(), index.lexicon(), options);
  return Index(index.config(), std::move(lexicon), index.collection(), index.build_stats(),
               std::move(pool));
}

Index compact_index(const Index& index) {
  return compact_index(index, index.pool().options());
}

void write_index(const Index& index, std::ostream& out) {
  std::vector<std::uint8_t> buf;
  buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
  bytes::append_u32(buf, kIndexFormatVersion);
  bytes::append_u32(buf, 0);

  const Config& config = index.config();
  bytes::append_u32(buf, config.block_size);
  bytes::append_u32(buf, config.cap_exponent);
  bytes::append_u32(buf, config.df_threshold);
  bytes::append_u32(buf, config.positional ? 1 : 0);
  bytes::append_u64(buf, index.pool().options().block_bytes);

  const auto& entries = index.lexicon().entries();
  bytes::append_u64(buf, entries.size());
  for (const auto& e : entries) {
    bytes::append_u16(buf, static_cast<std::uint16_t>(e.term.size()));
    buf.insert(buf.end(), e.term.begin(), e.term.end());
    bytes::append_u32(buf, e.df);
    bytes::append_u64(buf, e.head);
    bytes::append_u64(buf, e.tail);
  }

  const auto& stats = index.collection();
  bytes::append_u64(buf, stats.doc_count());
  bytes::append_u64(buf, stats.total_tokens());
  for (std::size_t i = 0; i < stats.docids().size(); ++i) {
    bytes::append_u32(buf, stats.docids()[i]);
    bytes::append_u32(buf, stats.lengths()[i]);
  }

  const auto& build = index.build_stats();
  bytes::append_u64(buf, build.peak_buffers.docid_bytes);
  bytes::append_u64(buf, build.peak_buffers.tf_bytes);
  bytes::append_u64(buf, build.peak_buffers.position_bytes);
  bytes::append_u64(buf, build.vocabulary_seen);
  bytes::append_u64(buf, build.discarded_terms);
  bytes::append_u32(buf, static_cast<std::uint32_t>(build.buffer_length_histogram.size()));
  for (auto count : build.buffer_length_histogram) bytes::append_u64(buf, count);

  const auto& ps = index.pool().stats();
  bytes::append_u64(buf, ps.segments);
  bytes::append_u64(buf, ps.segment_bytes);
  bytes::append_u64(buf, ps.padding_bytes);
  bytes::append_u64(buf, ps.block_waste_bytes);
  bytes::append_u64(buf, index.pool().end());

  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  index.pool().write_bytes(out);
  if (!out) throw IoError("write error on index stream");
}

void save_index(const Index& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_index(index, out);
  out.close();
  if (!out) throw IoError("error closing '" + path + "'");
}

Index read_index(std::istream& in) {
  const std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read error on index stream");
  Reader r(data);

  const auto magic = r.take(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FileFormatError("not an index file (bad magic)");
  }
  const auto version = r.u32();
  if (version != kIndexFormatVersion) {
    throw FileFormatError("unsupported index format version " + std::to_string(version));
  }
  r.u32();

  Config config;
  config.block_size = r.u32();
  config.cap_exponent = r.u32();
  config.df_threshold = r.u32();
  const auto positional = r.u32();
  if (positional > 1) throw FileFormatError("bad positional flag");
  config.positional = positional == 1;
  PoolOptions pool_options;
  pool_options.block_bytes = r.u64();
  try {
    config.validate();
    pool_options.validate();
  } catch (const InvariantViolation& e) {
    throw FileFormatError(std::string("bad configuration: ") + e.what());
  }

  const auto vocabulary = r.u64();
  std::vector<TermEntry> entries;
  for (std::uint64_t i = 0; i < vocabulary; ++i) {
    TermEntry e;
    const auto len = r.u16();
    const auto term = r.take(len);
    e.term.assign(term.begin(), term.end());
    e.df = r.u32();
    e.head = r.u64();
    e.tail = r.u64();
    entries.push_back(std::move(e));
  }

  CollectionStats stats;
  const auto doc_count = r.u64();
  const auto total_tokens = r.u64();
  for (std::uint64_t i = 0; i < doc_count; ++i) {
    const auto docid = r.u32();
    const auto length = r.u32();
    try {
      stats.add_document(docid, length);
    } catch (const InputOrderError&) {
      throw FileFormatError("document table out of order");
    }
  }
  if (stats.total_tokens() != total_tokens) {
    throw FileFormatError("document lengths disagree with the token total");
  }

  BuildStats build;
  build.peak_buffers.docid_bytes = r.u64();
  build.peak_buffers.tf_bytes = r.u64();
  build.peak_buffers.position_bytes = r.u64();
  build.vocabulary_seen = r.u64();
  build.discarded_terms = r.u64();
  const auto bins = r.u32();
  if (bins > 64) throw FileFormatError("histogram too long");
  for (std::uint32_t i = 0; i < bins; ++i) build.buffer_length_histogram.push_back(r.u64());

  PoolStats pool_stats;
  pool_stats.segments = r.u64();
  pool_stats.segment_bytes = r.u64();
  pool_stats.padding_bytes = r.u64();
  pool_stats.block_waste_bytes = r.u64();
  const auto pool_length = r.u64();
  const auto pool_bytes = r.take(pool_length);
  if (!r.done()) throw FileFormatError("trailing bytes after pool");
  if (pool_stats.segment_bytes + pool_stats.padding_bytes + pool_stats.block_waste_bytes !=
      pool_length) {
    throw FileFormatError("pool statistics disagree with pool length");
  }
  for (const auto& e : entries) {
    if (e.head >= pool_length || e.tail >= pool_length) {
      throw FileFormatError("term '" + e.term + "' points outside the pool");
    }
  }

  auto pool = SegmentPool::from_bytes(pool_bytes, config.block_size, config.positional,
                                      pool_options, pool_stats);
  return Index(config, Lexicon(std::move(entries)), std::move(stats), std::move(build),
               std::move(pool));
}

Index load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index '" + path + "'");
  return read_index(in);
}

}  // namespace incidx
