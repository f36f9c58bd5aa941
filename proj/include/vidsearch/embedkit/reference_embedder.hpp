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

#include "vidsearch/embedkit/embedding.hpp"

namespace vidsearch::embedkit {

/// Deterministic signed feature-hashing embedder.
///
/// Text: lowercase, split on Unicode whitespace, hash each token with FNV-1a
/// 64; add +1 at bin (h mod D) when bit 8 of h is set, else -1; L2-normalize.
///
/// Frames: every consecutive 8-byte window of a blob (stride 1; shorter blobs
/// are one window) is hashed into a per-frame accumulator the same way. Each
/// frame is normalized, the frames are averaged, and the mean is normalized.
///
/// All accumulation is in double; only the final vector is rounded to float.
/// An input with no tokens (or whose hashes cancel exactly) yields a missing
/// zero vector.
class ReferenceEmbedder final : public Embedder {
public:
    explicit ReferenceEmbedder(std::size_t dimension);

    std::size_t dimension() const override { return dimension_; }
    Embedding embed_text(std::string_view text) const override;
    Embedding embed_frames(std::span<const Frame> frames) const override;

private:
    std::size_t dimension_;
};

}  // namespace vidsearch::embedkit
