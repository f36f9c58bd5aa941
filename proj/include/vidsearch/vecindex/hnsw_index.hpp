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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vidsearch/embedkit/embedding.hpp"

namespace vidsearch::vecindex {

struct IndexParams {
    std::size_t m = 16;                 // max degree on upper layers; layer 0 allows 2m
    std::size_t ef_construction = 200;
    std::size_t ef_search = 100;
    std::uint64_t seed = 0x5EEDULL;

    void validate() const;
    friend bool operator==(const IndexParams&, const IndexParams&) = default;
};

struct IndexEntry {
    std::string video_id;
    embedkit::Embedding vector;
};

struct SearchHit {
    std::string video_id;
    double score = 0.0;  // exact inner product with the query

    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// Hierarchical navigable small-world graph over raw inner-product
/// similarity. Vectors are stored as given (never normalized).
///
/// Thread safety: any number of concurrent searches, or one insert.
/// Level assignment is a pure function of (seed, insertion ordinal), so two
/// indexes fed the same entries in the same order are identical.
class HnswIndex {
public:
    HnswIndex(std::size_t dimension, IndexParams params);

    HnswIndex(HnswIndex&& other) noexcept;
    HnswIndex& operator=(HnswIndex&& other) noexcept;
    HnswIndex(const HnswIndex&) = delete;
    HnswIndex& operator=(const HnswIndex&) = delete;

    /// Throws DuplicateId, DimensionMismatch, or InvalidArgument for a
    /// missing embedding.
    void insert(const IndexEntry& entry);

    /// Top min(k, size) hits ordered by (score desc, id asc). The beam width
    /// is max(ef_search, k); with ef_search >= size() the result is exact.
    /// Throws EmptyIndex, InvalidArgument (k == 0), DimensionMismatch.
    std::vector<SearchHit> search(std::span<const float> query, std::size_t k,
                                  std::optional<std::size_t> ef_search = std::nullopt) const;

    /// Stored vector, bit-identical to what was inserted. Throws NotFound.
    embedkit::Embedding get(std::string_view video_id) const;
    bool contains(std::string_view video_id) const;

    std::size_t size() const;
    std::size_t dimension() const { return dimension_; }
    const IndexParams& params() const { return params_; }

    /// Graph introspection, mostly for invariant checks.
    int level_of(std::string_view video_id) const;
    std::vector<std::string> neighbors(std::string_view video_id, int layer) const;
    std::size_t max_degree(int layer) const { return layer == 0 ? 2 * params_.m : params_.m; }

    std::vector<std::uint8_t> serialize() const;
    static HnswIndex deserialize(std::span<const std::uint8_t> bytes);
    void save(const std::filesystem::path& path) const;
    /// Throws CorruptIndexFile on bad magic, truncation or checksum mismatch.
    static HnswIndex load(const std::filesystem::path& path);

private:
    using Node = std::uint32_t;

    struct Candidate {
        double score;
        Node node;
    };

    std::span<const float> vector_of(Node n) const {
        return {vectors_.data() + static_cast<std::size_t>(n) * dimension_, dimension_};
    }
    double score(std::span<const float> q, Node n) const;
    int draw_level(std::uint64_t ordinal) const;
    Node greedy_descend(std::span<const float> q, Node start, int from_layer, int to_layer) const;
    std::vector<Candidate> search_layer(std::span<const float> q, Node entry, std::size_t ef, int layer,
                                        std::vector<std::uint8_t>& visited) const;
    std::vector<Node> select_neighbors(std::vector<Candidate> candidates, std::size_t limit) const;
    void link(Node from, Node to, int layer);
    Node node_of(std::string_view video_id) const;

    std::size_t dimension_;
    IndexParams params_;
    std::vector<float> vectors_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, Node> id_to_node_;
    std::vector<int> levels_;
    std::vector<std::vector<std::vector<Node>>> links_;  // node -> layer -> sorted neighbors
    std::optional<Node> entry_;
    int max_level_ = -1;
    mutable std::shared_mutex mutex_;

    friend struct IndexCodec;
};

}  // namespace vidsearch::vecindex
