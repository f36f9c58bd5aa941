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

#include "vidsearch/embedkit/reference_embedder.hpp"

#include <cmath>
#include <optional>

#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::embedkit {

namespace {

void accumulate(std::vector<double>& acc, std::uint64_t h) {
    const double sign = ((h >> 8) & 1U) ? 1.0 : -1.0;
    acc[h % acc.size()] += sign;
}

// Divides by the L2 norm in place; nullopt when the vector is all zeros.
std::optional<std::vector<double>> normalized(std::vector<double> v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    const double norm = std::sqrt(sum);
    if (norm == 0.0) return std::nullopt;
    for (double& x : v) x /= norm;
    return v;
}

Embedding to_embedding(const std::optional<std::vector<double>>& unit, std::size_t dimension) {
    if (!unit) return Embedding::zeros(dimension);
    Embedding e;
    e.values.reserve(dimension);
    for (double x : *unit) e.values.push_back(static_cast<float>(x));
    return e;
}

}  // namespace

ReferenceEmbedder::ReferenceEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) raise(ErrorCode::Config, "embedding dimension must be >= 1");
}

Embedding ReferenceEmbedder::embed_text(std::string_view text) const {
    const auto tokens = split_whitespace(utf8_lower(text));
    if (tokens.empty()) return Embedding::zeros(dimension_);
    std::vector<double> acc(dimension_, 0.0);
    for (const auto& token : tokens) accumulate(acc, fnv1a64(token));
    return to_embedding(normalized(std::move(acc)), dimension_);
}

Embedding ReferenceEmbedder::embed_frames(std::span<const Frame> frames) const {
    if (frames.empty()) raise(ErrorCode::EmptyFrameSet, "frame set is empty");
    std::vector<double> mean(dimension_, 0.0);
    for (const Frame& blob : frames) {
        std::vector<double> acc(dimension_, 0.0);
        const std::span<const std::uint8_t> bytes(blob);
        if (bytes.size() < 8) {
            accumulate(acc, fnv1a64(bytes));
        } else {
            for (std::size_t i = 0; i + 8 <= bytes.size(); ++i) accumulate(acc, fnv1a64(bytes.subspan(i, 8)));
        }
        if (auto unit = normalized(std::move(acc))) {
            for (std::size_t i = 0; i < dimension_; ++i) mean[i] += (*unit)[i];
        }
    }
    const double n = static_cast<double>(frames.size());
    for (double& x : mean) x /= n;
    return to_embedding(normalized(std::move(mean)), dimension_);
}

}  // namespace vidsearch::embedkit
