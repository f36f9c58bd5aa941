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

#include "vidsearch/embedkit/infonce.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vidsearch/common/error.hpp"

namespace vidsearch::embedkit {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void validate(const ContrastiveBatch& batch) {
    const std::size_t n = batch.queries.size();
    if (n == 0) raise(ErrorCode::InvalidArgument, "contrastive batch is empty");
    if (batch.positives.size() != n || batch.hard_negatives.size() != n) {
        raise(ErrorCode::InvalidArgument, "queries, positives and hard negatives must have equal length");
    }
    if (!std::isfinite(batch.temperature)) raise(ErrorCode::NonFiniteInput, "temperature is not finite");
    if (batch.temperature <= 0.0) raise(ErrorCode::InvalidArgument, "temperature must be positive");
    const std::size_t dim = batch.queries.front().size();
    if (dim == 0) raise(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
    for (const auto* list : {&batch.queries, &batch.positives, &batch.hard_negatives}) {
        for (const auto& v : *list) {
            if (v.size() != dim) raise(ErrorCode::DimensionMismatch, "batch embeddings differ in dimension");
            for (double x : v) {
                if (!std::isfinite(x)) raise(ErrorCode::NonFiniteInput, "batch contains a non-finite value");
            }
        }
    }
}

InfoNceResult compute(const ContrastiveBatch& batch, bool with_gradients) {
    validate(batch);
    const std::size_t n = batch.queries.size();
    const std::size_t dim = batch.queries.front().size();
    const double inv_t = 1.0 / batch.temperature;

    InfoNceResult out;
    if (with_gradients) {
        out.grad_queries.assign(n, std::vector<double>(dim, 0.0));
        out.grad_positives.assign(n, std::vector<double>(dim, 0.0));
        out.grad_hard_negatives.assign(n, std::vector<double>(dim, 0.0));
    }

    std::vector<double> logits(n + 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& q = batch.queries[i];
        for (std::size_t j = 0; j < n; ++j) logits[j] = dot(q, batch.positives[j]) * inv_t;
        logits[n] = dot(q, batch.hard_negatives[i]) * inv_t;

        const double peak = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (double l : logits) z += std::exp(l - peak);
        const double log_z = peak + std::log(z);
        total += log_z - logits[i];

        if (!with_gradients) continue;
        // d loss_i / d logit_c = softmax_c - [c == i]; the mean contributes 1/n.
        for (std::size_t c = 0; c <= n; ++c) {
            double w = std::exp(logits[c] - log_z);
            if (c == i) w -= 1.0;
            const double coeff = w * inv_t / static_cast<double>(n);
            const auto& cand = c < n ? batch.positives[c] : batch.hard_negatives[i];
            auto& g_cand = c < n ? out.grad_positives[c] : out.grad_hard_negatives[i];
            for (std::size_t d = 0; d < dim; ++d) {
                out.grad_queries[i][d] += coeff * cand[d];
                g_cand[d] += coeff * q[d];
            }
        }
    }
    out.loss = total / static_cast<double>(n);
    return out;
}

}  // namespace

double infonce_loss(const ContrastiveBatch& batch) { return compute(batch, false).loss; }

InfoNceResult infonce_loss_with_gradients(const ContrastiveBatch& batch) { return compute(batch, true); }

}  // namespace vidsearch::embedkit
