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

#include "vidsearch/vecindex/hnsw_index.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <queue>

#include "vidsearch/common/error.hpp"

namespace vidsearch::vecindex {

namespace {

constexpr int kMaxLevel = 32;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

void IndexParams::validate() const {
    if (m < 2) raise(ErrorCode::Config, "index m must be >= 2");
    if (ef_construction < m) raise(ErrorCode::Config, "ef_construction must be >= m");
    if (ef_search < 1) raise(ErrorCode::Config, "ef_search must be >= 1");
}

HnswIndex::HnswIndex(std::size_t dimension, IndexParams params) : dimension_(dimension), params_(params) {
    if (dimension_ == 0) raise(ErrorCode::Config, "index dimension must be >= 1");
    params_.validate();
}

HnswIndex::HnswIndex(HnswIndex&& other) noexcept
    : dimension_(other.dimension_),
      params_(other.params_),
      vectors_(std::move(other.vectors_)),
      ids_(std::move(other.ids_)),
      id_to_node_(std::move(other.id_to_node_)),
      levels_(std::move(other.levels_)),
      links_(std::move(other.links_)),
      entry_(other.entry_),
      max_level_(other.max_level_) {}

HnswIndex& HnswIndex::operator=(HnswIndex&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        dimension_ = other.dimension_;
        params_ = other.params_;
        vectors_ = std::move(other.vectors_);
        ids_ = std::move(other.ids_);
        id_to_node_ = std::move(other.id_to_node_);
        levels_ = std::move(other.levels_);
        links_ = std::move(other.links_);
        entry_ = other.entry_;
        max_level_ = other.max_level_;
    }
    return *this;
}

double HnswIndex::score(std::span<const float> q, Node n) const { return embedkit::inner_product(q, vector_of(n)); }

int HnswIndex::draw_level(std::uint64_t ordinal) const {
    const std::uint64_t bits = splitmix64(params_.seed ^ splitmix64(ordinal));
    const double u = static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double level = std::floor(-std::log(u) / std::log(static_cast<double>(params_.m)));
    return std::min(static_cast<int>(level), kMaxLevel);
}

namespace {

struct Better {
    template <typename C>
    bool operator()(const C& a, const C& b) const {
        return a.score > b.score || (a.score == b.score && a.node < b.node);
    }
};

}  // namespace

HnswIndex::Node HnswIndex::greedy_descend(std::span<const float> q, Node start, int from_layer, int to_layer) const {
    Node cur = start;
    double cur_score = score(q, cur);
    for (int layer = from_layer; layer >= to_layer; --layer) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (Node nb : links_[cur][layer]) {
                const double s = score(q, nb);
                if (s > cur_score || (s == cur_score && nb < cur)) {
                    cur = nb;
                    cur_score = s;
                    changed = true;
                }
            }
        }
    }
    return cur;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(std::span<const float> q, Node entry, std::size_t ef,
                                                          int layer, std::vector<std::uint8_t>& visited) const {
    const Better better;
    auto worse = [&](const Candidate& a, const Candidate& b) { return better(b, a); };
    // frontier: best on top. results: worst on top.
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> frontier(worse);
    std::priority_queue<Candidate, std::vector<Candidate>, Better> results(better);

    const Candidate first{score(q, entry), entry};
    visited[entry] = 1;
    frontier.push(first);
    results.push(first);

    while (!frontier.empty()) {
        const Candidate c = frontier.top();
        if (results.size() >= ef && !better(c, results.top())) break;
        frontier.pop();
        for (Node nb : links_[c.node][layer]) {
            if (visited[nb]) continue;
            visited[nb] = 1;
            const Candidate cand{score(q, nb), nb};
            if (results.size() < ef || better(cand, results.top())) {
                frontier.push(cand);
                results.push(cand);
                if (results.size() > ef) results.pop();
            }
        }
    }

    std::vector<Candidate> out;
    out.reserve(results.size());
    while (!results.empty()) {
        out.push_back(results.top());
        results.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<HnswIndex::Node> HnswIndex::select_neighbors(std::vector<Candidate> candidates, std::size_t limit) const {
    std::sort(candidates.begin(), candidates.end(), Better{});
    std::vector<Node> selected;
    for (const Candidate& c : candidates) {
        if (selected.size() >= limit) break;
        bool diverse = true;
        for (Node s : selected) {
            if (embedkit::inner_product(vector_of(c.node), vector_of(s)) > c.score) {
                diverse = false;
                break;
            }
        }
        if (diverse) selected.push_back(c.node);
    }
    return selected;
}

void HnswIndex::link(Node from, Node to, int layer) {
    auto& list = links_[from][layer];
    list.insert(std::lower_bound(list.begin(), list.end(), to), to);
    if (list.size() <= max_degree(layer)) return;
    std::vector<Candidate> candidates;
    candidates.reserve(list.size());
    const auto base = vector_of(from);
    for (Node n : list) candidates.push_back({score(base, n), n});
    list = select_neighbors(std::move(candidates), max_degree(layer));
    std::sort(list.begin(), list.end());
}

void HnswIndex::insert(const IndexEntry& entry) {
    std::unique_lock lock(mutex_);
    if (entry.vector.dimension() != dimension_) {
        raise(ErrorCode::DimensionMismatch, "vector for '" + entry.video_id + "' has dimension " +
                                                std::to_string(entry.vector.dimension()) + ", index expects " +
                                                std::to_string(dimension_));
    }
    if (entry.vector.missing) raise(ErrorCode::InvalidArgument, "cannot index a missing embedding");
    if (id_to_node_.contains(entry.video_id)) raise(ErrorCode::DuplicateId, "duplicate id '" + entry.video_id + "'");

    const Node node = static_cast<Node>(ids_.size());
    const int level = draw_level(node);
    vectors_.insert(vectors_.end(), entry.vector.values.begin(), entry.vector.values.end());
    ids_.push_back(entry.video_id);
    id_to_node_.emplace(entry.video_id, node);
    levels_.push_back(level);
    links_.emplace_back(static_cast<std::size_t>(level) + 1);

    if (!entry_) {
        entry_ = node;
        max_level_ = level;
        return;
    }

    const auto q = vector_of(node);
    Node cur = *entry_;
    if (level < max_level_) cur = greedy_descend(q, cur, max_level_, level + 1);

    std::vector<std::uint8_t> visited;
    for (int layer = std::min(level, max_level_); layer >= 0; --layer) {
        visited.assign(ids_.size(), 0);
        auto found = search_layer(q, cur, params_.ef_construction, layer, visited);
        auto chosen = select_neighbors(found, params_.m);
        std::sort(chosen.begin(), chosen.end());
        links_[node][layer] = chosen;
        for (Node nb : chosen) link(nb, node, layer);
        cur = found.front().node;
    }
    if (level > max_level_) {
        entry_ = node;
        max_level_ = level;
    }
}

std::vector<SearchHit> HnswIndex::search(std::span<const float> query, std::size_t k,
                                         std::optional<std::size_t> ef_search) const {
    std::shared_lock lock(mutex_);
    if (!entry_) raise(ErrorCode::EmptyIndex, "index is empty");
    if (k == 0) raise(ErrorCode::InvalidArgument, "k must be >= 1");
    if (query.size() != dimension_) {
        raise(ErrorCode::DimensionMismatch, "query dimension " + std::to_string(query.size()) + ", index expects " +
                                                std::to_string(dimension_));
    }
    const std::size_t ef = std::max(ef_search.value_or(params_.ef_search), k);
    const std::size_t n = ids_.size();

    Node start = *entry_;
    if (max_level_ > 0) start = greedy_descend(query, start, max_level_, 1);
    std::vector<std::uint8_t> visited(n, 0);
    auto found = search_layer(query, start, ef, 0, visited);

    // A beam as wide as the index must see every node; cover any that the
    // graph walk could not reach.
    if (ef >= n && found.size() < n) {
        for (Node node = 0; node < n; ++node) {
            if (!visited[node]) found.push_back({score(query, node), node});
        }
    }

    std::vector<SearchHit> hits;
    hits.reserve(found.size());
    for (const Candidate& c : found) hits.push_back({ids_[c.node], c.score});
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        return a.score > b.score || (a.score == b.score && a.video_id < b.video_id);
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

HnswIndex::Node HnswIndex::node_of(std::string_view video_id) const {
    const auto it = id_to_node_.find(std::string(video_id));
    if (it == id_to_node_.end()) raise(ErrorCode::NotFound, "no vector for '" + std::string(video_id) + "'");
    return it->second;
}

embedkit::Embedding HnswIndex::get(std::string_view video_id) const {
    std::shared_lock lock(mutex_);
    const auto v = vector_of(node_of(video_id));
    return {std::vector<float>(v.begin(), v.end()), false};
}

bool HnswIndex::contains(std::string_view video_id) const {
    std::shared_lock lock(mutex_);
    return id_to_node_.contains(std::string(video_id));
}

std::size_t HnswIndex::size() const {
    std::shared_lock lock(mutex_);
    return ids_.size();
}

int HnswIndex::level_of(std::string_view video_id) const {
    std::shared_lock lock(mutex_);
    return levels_[node_of(video_id)];
}

std::vector<std::string> HnswIndex::neighbors(std::string_view video_id, int layer) const {
    std::shared_lock lock(mutex_);
    const Node node = node_of(video_id);
    if (layer < 0 || layer > levels_[node]) return {};
    std::vector<std::string> out;
    for (Node nb : links_[node][layer]) out.push_back(ids_[nb]);
    return out;
}

}  // namespace vidsearch::vecindex
