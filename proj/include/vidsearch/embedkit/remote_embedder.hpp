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

/// Client for an embedding service speaking
///   POST /embed {"kind":"text"|"frames","text":..,"frames":[base64,..]}
///     -> {"values":[float,..]}
/// Blank text short-circuits to a missing zero vector without a request.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(std::size_t dimension, HttpEndpoint endpoint);

    std::size_t dimension() const override { return dimension_; }
    Embedding embed_text(std::string_view text) const override;
    Embedding embed_frames(std::span<const Frame> frames) const override;

private:
    Embedding request(const nlohmann::json& body) const;

    std::size_t dimension_;
    HttpEndpoint endpoint_;
};

}  // namespace vidsearch::embedkit
