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

#pragma once

#include <cstddef>
#include <vector>

namespace vidsearch::ingest {

inline constexpr std::size_t kDefaultFramesPerVideo = 48;

/// Uniformly spaced frame positions: all of [0, total) when total <= target,
/// otherwise floor(i * total / target) for i in [0, target). Throws
/// Error(InvalidArgument) when target is 0.
std::vector<std::size_t> sample_frame_indices(std::size_t total, std::size_t target = kDefaultFramesPerVideo);

}  // namespace vidsearch::ingest
