// Copyright 2026-present the vidsearch authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vidsearch/ingest/frame_sampling.hpp"

#include "vidsearch/common/error.hpp"

namespace vidsearch::ingest {

std::vector<std::size_t> sample_frame_indices(std::size_t total, std::size_t target) {
    if (target == 0) raise(ErrorCode::InvalidArgument, "frame target must be >= 1");
    std::vector<std::size_t> out;
    if (total <= target) {
        out.reserve(total);
        for (std::size_t i = 0; i < total; ++i) out.push_back(i);
        return out;
    }
    out.reserve(target);
    for (std::size_t i = 0; i < target; ++i) out.push_back(i * total / target);
    return out;
}

}  // namespace vidsearch::ingest
