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

#include "incidx/index.hpp"

#include <algorithm>
#include <string>

#include "incidx/error.hpp"

namespace incidx {

void CollectionStats::add_document(DocId docid, std::uint32_t length) {
  if (!docids_.empty()) {
    if (docid <= docids_.back()) {
      throw InputOrderError("docid " + std::to_string(docid) + " does not follow " +
                            std::to_string(docids_.back()));
    }
    dense_ = dense_ && docid == docids_.back() + 1;
  }
  docids_.push_back(docid);
  lengths_.push_back(length);
  total_tokens_ += length;
}

std::uint32_t CollectionStats::doclen(DocId docid) const {
  if (!docids_.empty() && dense_) {
    const auto at = static_cast<std::uint64_t>(docid) - docids_.front();
    if (docid >= docids_.front() && at < docids_.size()) return lengths_[at];
  } else {
    const auto it = std::lower_bound(docids_.begin(), docids_.end(), docid);
    if (it != docids_.end() && *it == docid) return lengths_[it - docids_.begin()];
  }
  throw InvariantViolation("unknown docid " + std::to_string(docid));
}

Index::Index(Config config, Lexicon lexicon, CollectionStats stats, BuildStats build,
             SegmentPool pool)
    : config_(config),
      lexicon_(std::move(lexicon)),
      stats_(std::move(stats)),
      build_(std::move(build)),
      pool_(std::move(pool)) {}

TermPostings Index::postings(TermId term) const {
  TermPostings out;
  DecodedSegment seg;
  for (PoolOffset at = lexicon_.entry(term).head; at != kNoOffset; at = seg.next) {
    pool_.read_segment(at, seg);
    out.docids.insert(out.docids.end(), seg.docids.begin(), seg.docids.end());
    out.tfs.insert(out.tfs.end(), seg.tfs.begin(), seg.tfs.end());
    auto per_doc = seg.per_doc_positions();
    std::move(per_doc.begin(), per_doc.end(), std::back_inserter(out.positions));
  }
  return out;
}

}  // namespace incidx
