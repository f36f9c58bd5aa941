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

#include "vidsearch/embedkit/embedding.hpp"

#include <cmath>
#include <string>

#include "vidsearch/common/error.hpp"
#include "vidsearch/embedkit/reference_embedder.hpp"
#include "vidsearch/embedkit/remote_embedder.hpp"

namespace vidsearch::embedkit {

double inner_product(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::DimensionMismatch,
              "inner product of dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return sum;
}

double inner_product(const Embedding& a, const Embedding& b) { return inner_product(a.values, b.values); }

double l2_norm(std::span<const float> v) {
    double sum = 0.0;
    for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(sum);
}

void EmbedderConfig::validate() const {
    if (dimension == 0) raise(ErrorCode::Config, "embedding dimension must be >= 1");
    if (remote.timeout.count() <= 0) raise(ErrorCode::Config, "embedder timeout must be positive");
    if (kind == ProviderKind::Remote && remote.base_url.empty()) {
        raise(ErrorCode::Config, "remote embedder requires an endpoint URL");
    }
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
    cfg.validate();
    if (cfg.kind == ProviderKind::Remote) return std::make_unique<RemoteEmbedder>(cfg.dimension, cfg.remote);
    return std::make_unique<ReferenceEmbedder>(cfg.dimension);
}

Embedding embed_text(std::string_view text, const EmbedderConfig& cfg) { return make_embedder(cfg)->embed_text(text); }

Embedding embed_frames(std::span<const Frame> frames, const EmbedderConfig& cfg) {
    return make_embedder(cfg)->embed_frames(frames);
}

}  // namespace vidsearch::embedkit
