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

#include "incidx/error.hpp"

namespace incidx {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvariantViolation: return "invariant violation";
    case ErrorKind::kCorruptSegment: return "corrupt segment";
    case ErrorKind::kCapacity: return "capacity exceeded";
    case ErrorKind::kInputFormat: return "input format";
    case ErrorKind::kInputOrder: return "input order";
    case ErrorKind::kState: return "invalid state";
    case ErrorKind::kIo: return "i/o";
    case ErrorKind::kFileFormat: return "index file format";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

}  // namespace incidx
