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
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "vidsearch/common/http_client.hpp"

namespace vidsearch::embedkit {

/// Fixed-dimension vector in inner-product space. `missing` marks an absent
/// modality; a missing embedding is all zeros and contributes nothing to a
/// fused score.
struct Embedding {
    std::vector<float> values;
    bool missing = false;

    std::size_t dimension() const { return values.size(); }

    static Embedding zeros(std::size_t dimension) { return {std::vector<float>(dimension, 0.0f), true}; }

    friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Accumulates in double, in index order.
double inner_product(std::span<const float> a, std::span<const float> b);
double inner_product(const Embedding& a, const Embedding& b);
double l2_norm(std::span<const float> v);

using Frame = std::vector<std::uint8_t>;

enum class ProviderKind { Reference, Remote };

struct EmbedderConfig {
    std::size_t dimension = 256;
    ProviderKind kind = ProviderKind::Reference;
    HttpEndpoint remote;  // remote only; carries timeout and retries

    /// Throws Error(Config) when dimension is 0 or the timeout is not positive.
    void validate() const;
};

/// The retrieval-model role: maps text and frame sets into one shared space.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    virtual Embedding embed_text(std::string_view text) const = 0;
    /// Throws Error(EmptyFrameSet) on an empty list.
    virtual Embedding embed_frames(std::span<const Frame> frames) const = 0;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

Embedding embed_text(std::string_view text, const EmbedderConfig& cfg);
Embedding embed_frames(std::span<const Frame> frames, const EmbedderConfig& cfg);

}  // namespace vidsearch::embedkit
