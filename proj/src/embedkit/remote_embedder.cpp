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

#include "vidsearch/embedkit/remote_embedder.hpp"

#include <cmath>

#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::embedkit {

RemoteEmbedder::RemoteEmbedder(std::size_t dimension, HttpEndpoint endpoint)
    : dimension_(dimension), endpoint_(std::move(endpoint)) {}

Embedding RemoteEmbedder::embed_text(std::string_view text) const {
    if (is_blank(text)) return Embedding::zeros(dimension_);
    return request({{"kind", "text"}, {"text", std::string(text)}});
}

Embedding RemoteEmbedder::embed_frames(std::span<const Frame> frames) const {
    if (frames.empty()) raise(ErrorCode::EmptyFrameSet, "frame set is empty");
    nlohmann::json encoded = nlohmann::json::array();
    for (const auto& f : frames) encoded.push_back(base64_encode(f));
    return request({{"kind", "frames"}, {"frames", std::move(encoded)}});
}

Embedding RemoteEmbedder::request(const nlohmann::json& body) const {
    nlohmann::json response;
    try {
        response = post_json(endpoint_, "/embed", body);
    } catch (const HttpCallError& e) {
        raise(ErrorCode::RemoteEmbedderUnavailable, e.what());
    }
    const auto it = response.find("values");
    if (it == response.end() || !it->is_array()) {
        raise(ErrorCode::RemoteEmbedderUnavailable, "embedder response lacks a values array");
    }
    if (it->size() != dimension_) {
        raise(ErrorCode::DimensionMismatch, "embedder returned " + std::to_string(it->size()) +
                                                " values, expected " + std::to_string(dimension_));
    }
    Embedding e;
    e.values.reserve(dimension_);
    bool all_zero = true;
    for (const auto& v : *it) {
        if (!v.is_number()) raise(ErrorCode::RemoteEmbedderUnavailable, "non-numeric embedding value");
        const float x = v.get<float>();
        if (!std::isfinite(x)) raise(ErrorCode::RemoteEmbedderUnavailable, "non-finite embedding value");
        all_zero = all_zero && x == 0.0f;
        e.values.push_back(x);
    }
    e.missing = all_zero;
    return e;
}

}  // namespace vidsearch::embedkit
