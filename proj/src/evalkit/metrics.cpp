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

#include "vidsearch/evalkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "vidsearch/common/error.hpp"

namespace vidsearch::evalkit {

std::string_view to_string(Gain gain) { return gain == Gain::Exponential ? "exp" : "linear"; }

Gain parse_gain(std::string_view name) {
    if (name == "exp") return Gain::Exponential;
    if (name == "linear") return Gain::Linear;
    raise(ErrorCode::InvalidArgument, "unknown gain '" + std::string(name) + "' (expected exp or linear)");
}

double gain(int grade, Gain kind) {
    if (grade <= 0) return 0.0;
    return kind == Gain::Exponential ? std::exp2(static_cast<double>(grade)) - 1.0 : static_cast<double>(grade);
}

namespace {

double discounted(double g, std::size_t position) { return g / std::log2(static_cast<double>(position) + 1.0); }

void check_k(std::size_t k) {
    if (k == 0) raise(ErrorCode::InvalidArgument, "metric cutoff k must be >= 1");
}

}  // namespace

double ndcg_at_k(std::span<const std::string> ranking, const GradeMap& rels, std::size_t k, Gain kind) {
    check_k(k);
    double dcg = 0.0;
    std::set<std::string_view> seen;
    const std::size_t depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (!seen.insert(ranking[i]).second) continue;
        const auto it = rels.find(ranking[i]);
        if (it != rels.end()) dcg += discounted(gain(it->second, kind), i + 1);
    }

    std::vector<int> ideal;
    ideal.reserve(rels.size());
    for (const auto& [id, g] : rels) ideal.push_back(g);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) idcg += discounted(gain(ideal[i], kind), i + 1);
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

double recall_at_k(std::span<const std::string> ranking, const GradeMap& rels, std::size_t k) {
    check_k(k);
    std::size_t relevant = 0;
    for (const auto& [id, g] : rels) relevant += g > 0 ? 1 : 0;
    if (relevant == 0) raise(ErrorCode::NoRelevant, "no relevant videos for this query");

    std::set<std::string_view> seen;
    std::size_t found = 0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        if (!seen.insert(ranking[i]).second) continue;
        const auto it = rels.find(ranking[i]);
        if (it != rels.end() && it->second > 0) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(relevant);
}

}  // namespace vidsearch::evalkit
