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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <set>

#include "test_support.hpp"
#include "vidsearch/vecindex/hnsw_index.hpp"

namespace vidsearch::vecindex {
namespace {

using embedkit::Embedding;

Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& x : v) {
        x = g(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    Embedding e;
    for (double x : v) e.values.push_back(static_cast<float>(x / norm));
    return e;
}

std::string id_of(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "v%05zu", i);
    return buf;
}

// Exhaustive inner-product oracle, independent of the graph.
std::vector<SearchHit> brute_force(const std::vector<Embedding>& corpus, const Embedding& q, std::size_t k) {
    std::vector<SearchHit> all;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        double s = 0.0;
        for (std::size_t d = 0; d < q.values.size(); ++d) s += double(corpus[i].values[d]) * double(q.values[d]);
        all.push_back({id_of(i), s});
    }
    std::sort(all.begin(), all.end(), [](const SearchHit& a, const SearchHit& b) {
        return a.score != b.score ? a.score > b.score : a.video_id < b.video_id;
    });
    all.resize(std::min(k, all.size()));
    return all;
}

HnswIndex build(const std::vector<Embedding>& corpus, IndexParams params = {}) {
    HnswIndex index(corpus.front().dimension(), params);
    for (std::size_t i = 0; i < corpus.size(); ++i) index.insert({id_of(i), corpus[i]});
    return index;
}

std::vector<Embedding> random_corpus(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Embedding> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_unit(rng, dim));
    return out;
}

TEST(IndexParams, Validation) {
    EXPECT_ERROR_CODE((IndexParams{1, 200, 100, 0}.validate()), ErrorCode::Config);
    EXPECT_ERROR_CODE((IndexParams{16, 8, 100, 0}.validate()), ErrorCode::Config);
    EXPECT_ERROR_CODE((IndexParams{16, 200, 0, 0}.validate()), ErrorCode::Config);
    EXPECT_NO_THROW(IndexParams{}.validate());
    EXPECT_EQ(IndexParams{}.m, 16U);
    EXPECT_EQ(IndexParams{}.ef_construction, 200U);
}

TEST(HnswIndex, InsertThenGetIsExact) {
    HnswIndex index(3, {});
    const Embedding v{{0.25f, -1.5f, 3.0f}, false};
    index.insert({"a", v});
    EXPECT_EQ(index.get("a"), v);
    EXPECT_TRUE(index.contains("a"));
    EXPECT_FALSE(index.contains("b"));
    EXPECT_ERROR_CODE(index.get("b"), ErrorCode::NotFound);
}

TEST(HnswIndex, InsertErrors) {
    HnswIndex index(2, {});
    index.insert({"a", {{1.0f, 0.0f}, false}});
    EXPECT_ERROR_CODE(index.insert({"a", {{0.0f, 1.0f}, false}}), ErrorCode::DuplicateId);
    EXPECT_ERROR_CODE(index.insert({"b", {{1.0f, 0.0f, 0.0f}, false}}), ErrorCode::DimensionMismatch);
    EXPECT_ERROR_CODE(index.insert({"c", Embedding::zeros(2)}), ErrorCode::InvalidArgument);
    EXPECT_EQ(index.size(), 1U);
}

TEST(HnswIndex, SingleVectorSearch) {
    HnswIndex index(2, {});
    index.insert({"only", {{2.0f, 1.0f}, false}});
    const std::vector<float> q = {0.5f, -1.0f};
    const auto hits = index.search(q, 10);
    ASSERT_EQ(hits.size(), 1U);
    EXPECT_EQ(hits[0].video_id, "only");
    // Raw inner product: no normalization of the stored vector.
    EXPECT_EQ(hits[0].score, 2.0 * 0.5 + 1.0 * -1.0);
}

TEST(HnswIndex, KLargerThanCorpus) {
    const auto corpus = random_corpus(3, 8, 1);
    const auto index = build(corpus);
    EXPECT_EQ(index.search(corpus[0].values, 10).size(), 3U);
}

TEST(HnswIndex, SearchErrors) {
    HnswIndex index(2, {});
    const std::vector<float> q = {1.0f, 0.0f};
    EXPECT_ERROR_CODE(index.search(q, 1), ErrorCode::EmptyIndex);
    index.insert({"a", {{1.0f, 0.0f}, false}});
    EXPECT_ERROR_CODE(index.search(q, 0), ErrorCode::InvalidArgument);
    const std::vector<float> wrong = {1.0f};
    EXPECT_ERROR_CODE(index.search(wrong, 1), ErrorCode::DimensionMismatch);
}

TEST(HnswIndex, TiesBrokenByIdAscending) {
    HnswIndex index(2, {});
    for (const char* id : {"d", "b", "c", "a"}) index.insert({id, {{1.0f, 0.0f}, false}});
    const std::vector<float> q = {1.0f, 0.0f};
    const auto hits = index.search(q, 3);
    ASSERT_EQ(hits.size(), 3U);
    EXPECT_EQ(hits[0].video_id, "a");
    EXPECT_EQ(hits[1].video_id, "b");
    EXPECT_EQ(hits[2].video_id, "c");
}

TEST(HnswIndex, DoubleBuildIsBitIdentical) {
    const auto corpus = random_corpus(1000, 32, 77);
    const auto a = build(corpus);
    const auto b = build(corpus);
    EXPECT_EQ(a.serialize(), b.serialize());
}

TEST(HnswIndex, DifferentSeedsGiveDifferentGraphs) {
    const auto corpus = random_corpus(300, 16, 3);
    IndexParams p;
    p.seed = 1;
    const auto a = build(corpus, p);
    p.seed = 2;
    const auto b = build(corpus, p);
    EXPECT_NE(a.serialize(), b.serialize());
}

TEST(HnswIndex, FullBeamEqualsBruteForce) {
    for (std::size_t n : {50U, 600U, 2000U}) {
        const auto corpus = random_corpus(n, 16, n);
        const auto index = build(corpus, {8, 32, 10, 99});
        std::mt19937_64 rng(n + 1);
        for (int q = 0; q < 20; ++q) {
            const auto query = random_unit(rng, 16);
            EXPECT_EQ(index.search(query.values, 25, n), brute_force(corpus, query, 25)) << "n=" << n;
        }
    }
}

TEST(HnswIndex, RecallOnRandomUnitVectors) {
    const auto corpus = random_corpus(2000, 64, 2024);
    const auto index = build(corpus);
    std::mt19937_64 rng(5);
    double overlap = 0.0;
    for (int q = 0; q < 50; ++q) {
        const auto query = random_unit(rng, 64);
        const auto got = index.search(query.values, 10, 100);
        const auto want = brute_force(corpus, query, 10);
        std::set<std::string> truth;
        for (const auto& h : want) truth.insert(h.video_id);
        for (const auto& h : got) overlap += truth.count(h.video_id) ? 0.1 : 0.0;
    }
    EXPECT_GE(overlap / 50.0, 0.95);
}

TEST(HnswIndex, ResultsSortedAndUnique) {
    const auto corpus = random_corpus(500, 8, 8);
    const auto index = build(corpus);
    std::mt19937_64 rng(4);
    for (int q = 0; q < 30; ++q) {
        const auto hits = index.search(random_unit(rng, 8).values, 40, 20);
        std::set<std::string> seen;
        for (std::size_t i = 0; i < hits.size(); ++i) {
            EXPECT_TRUE(seen.insert(hits[i].video_id).second);
            if (i > 0) {
                const bool ordered = hits[i - 1].score > hits[i].score ||
                                     (hits[i - 1].score == hits[i].score && hits[i - 1].video_id < hits[i].video_id);
                EXPECT_TRUE(ordered);
            }
        }
    }
}

TEST(HnswIndex, DegreeBounds) {
    const auto corpus = random_corpus(1500, 16, 12);
    const IndexParams p{6, 40, 10, 5};
    const auto index = build(corpus, p);
    int max_level = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const int level = index.level_of(id_of(i));
        max_level = std::max(max_level, level);
        for (int layer = 0; layer <= level; ++layer) {
            const auto nbs = index.neighbors(id_of(i), layer);
            EXPECT_LE(nbs.size(), layer == 0 ? 2 * p.m : p.m);
            EXPECT_EQ(std::count(nbs.begin(), nbs.end(), id_of(i)), 0);
        }
    }
    EXPECT_GT(max_level, 0);
}

TEST(HnswIndex, ConcurrentSearchesMatchSequential) {
    const auto corpus = random_corpus(800, 16, 21);
    const auto index = build(corpus);
    std::mt19937_64 rng(22);
    std::vector<Embedding> queries;
    for (int i = 0; i < 32; ++i) queries.push_back(random_unit(rng, 16));
    std::vector<std::vector<SearchHit>> expected;
    for (const auto& q : queries) expected.push_back(index.search(q.values, 10));
    std::vector<std::future<std::vector<SearchHit>>> futures;
    for (const auto& q : queries) {
        futures.push_back(std::async(std::launch::async, [&index, &q] { return index.search(q.values, 10); }));
    }
    for (std::size_t i = 0; i < queries.size(); ++i) EXPECT_EQ(futures[i].get(), expected[i]);
}

class IndexFileTest : public ::testing::Test {
protected:
    vidsearch::testing::TempDir dir_{"vecindex"};
};

TEST_F(IndexFileTest, SaveLoadPreservesSearch) {
    const auto corpus = random_corpus(700, 24, 31);
    const auto index = build(corpus);
    const auto path = dir_.path() / "vision.idx";
    index.save(path);
    const auto loaded = HnswIndex::load(path);
    EXPECT_EQ(loaded.serialize(), index.serialize());
    EXPECT_EQ(loaded.params(), index.params());
    std::mt19937_64 rng(32);
    for (int q = 0; q < 100; ++q) {
        const auto query = random_unit(rng, 24);
        EXPECT_EQ(loaded.search(query.values, 10), index.search(query.values, 10));
    }
    for (std::size_t i = 0; i < corpus.size(); i += 97) EXPECT_EQ(loaded.get(id_of(i)), corpus[i]);
}

TEST_F(IndexFileTest, InsertAfterLoadMatchesUninterruptedBuild) {
    const auto corpus = random_corpus(200, 8, 41);
    const auto full = build(corpus);
    HnswIndex partial(8, {});
    for (std::size_t i = 0; i < 120; ++i) partial.insert({id_of(i), corpus[i]});
    partial.save(dir_.path() / "p.idx");
    auto resumed = HnswIndex::load(dir_.path() / "p.idx");
    for (std::size_t i = 120; i < corpus.size(); ++i) resumed.insert({id_of(i), corpus[i]});
    EXPECT_EQ(resumed.serialize(), full.serialize());
}

TEST_F(IndexFileTest, EmptyIndexRoundTrip) {
    HnswIndex empty(5, {});
    empty.save(dir_.path() / "empty.idx");
    const auto loaded = HnswIndex::load(dir_.path() / "empty.idx");
    EXPECT_EQ(loaded.size(), 0U);
    EXPECT_EQ(loaded.dimension(), 5U);
    const std::vector<float> q(5, 0.1f);
    EXPECT_ERROR_CODE(loaded.search(q, 1), ErrorCode::EmptyIndex);
}

TEST_F(IndexFileTest, CorruptionDetected) {
    const auto corpus = random_corpus(50, 8, 51);
    const auto bytes = build(corpus).serialize();

    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    EXPECT_ERROR_CODE(HnswIndex::deserialize(truncated), ErrorCode::CorruptIndexFile);
    EXPECT_ERROR_CODE(HnswIndex::deserialize(std::vector<std::uint8_t>(4, 0)), ErrorCode::CorruptIndexFile);

    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x01;
    EXPECT_ERROR_CODE(HnswIndex::deserialize(flipped), ErrorCode::CorruptIndexFile);

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_ERROR_CODE(HnswIndex::deserialize(bad_magic), ErrorCode::CorruptIndexFile);

    const auto path = dir_.path() / "trunc.idx";
    {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size() - 3));
    }
    EXPECT_ERROR_CODE(HnswIndex::load(path), ErrorCode::CorruptIndexFile);
}

TEST_F(IndexFileTest, MagicAndChecksumLayout) {
    HnswIndex index(2, {});
    index.insert({"a", {{1.0f, 2.0f}, false}});
    const auto bytes = index.serialize();
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), std::string("VAGIDX1\0", 8));
}

}  // namespace
}  // namespace vidsearch::vecindex
