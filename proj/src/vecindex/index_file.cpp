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

// On-disk layout:
//   "VAGIDX1\0"
//   u32 header length, header JSON (params, dimension, count, dtype, ids, levels, entry point)
//   count * dimension float32, little-endian, row-major
//   per node, per layer 0..level: varint degree, then delta-encoded varint neighbor ids
//   u32 CRC-32C of everything above

#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/vecindex/hnsw_index.hpp"

namespace vidsearch::vecindex {

namespace {

constexpr char kMagic[8] = {'V', 'A', 'G', 'I', 'D', 'X', '1', '\0'};

[[noreturn]] void corrupt(const std::string& why) { raise(ErrorCode::CorruptIndexFile, "corrupt index file: " + why); }

}  // namespace

struct IndexCodec {
    static std::vector<std::uint8_t> encode(const HnswIndex& index) {
        std::shared_lock lock(index.mutex_);
        nlohmann::json header = {
            {"format", 1},
            {"dimension", index.dimension_},
            {"count", index.ids_.size()},
            {"dtype", "float32"},
            {"params",
             {{"m", index.params_.m},
              {"ef_construction", index.params_.ef_construction},
              {"ef_search", index.params_.ef_search},
              {"seed", index.params_.seed}}},
            {"ids", index.ids_},
            {"levels", index.levels_},
            {"max_level", index.max_level_},
            {"entry_point", index.entry_ ? nlohmann::json(*index.entry_) : nlohmann::json(nullptr)},
        };
        const std::string header_text = header.dump();

        ByteWriter out;
        out.bytes(std::string_view(kMagic, sizeof(kMagic)));
        out.u32(static_cast<std::uint32_t>(header_text.size()));
        out.bytes(header_text);
        for (float v : index.vectors_) out.f32(v);
        for (const auto& layers : index.links_) {
            for (const auto& list : layers) {
                out.varint(list.size());
                HnswIndex::Node prev = 0;
                for (HnswIndex::Node nb : list) {
                    out.varint(nb - prev);
                    prev = nb;
                }
            }
        }
        const std::uint32_t crc = crc32c(out.data());
        out.u32(crc);
        return out.take();
    }

    static HnswIndex decode(std::span<const std::uint8_t> bytes) {
        if (bytes.size() < sizeof(kMagic) + 8) corrupt("truncated");
        if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) corrupt("bad magic");
        const auto body = bytes.first(bytes.size() - 4);
        ByteReader tail(bytes.last(4));
        if (crc32c(body) != tail.u32()) corrupt("checksum mismatch");

        try {
            ByteReader in(body);
            in.bytes(sizeof(kMagic));
            const std::uint32_t header_len = in.u32();
            const auto header_bytes = in.bytes(header_len);
            const auto header = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
            if (header.at("dtype").get<std::string>() != "float32") corrupt("unsupported dtype");

            IndexParams params;
            const auto& p = header.at("params");
            params.m = p.at("m").get<std::size_t>();
            params.ef_construction = p.at("ef_construction").get<std::size_t>();
            params.ef_search = p.at("ef_search").get<std::size_t>();
            params.seed = p.at("seed").get<std::uint64_t>();

            HnswIndex index(header.at("dimension").get<std::size_t>(), params);
            const auto count = header.at("count").get<std::size_t>();
            index.ids_ = header.at("ids").get<std::vector<std::string>>();
            index.levels_ = header.at("levels").get<std::vector<int>>();
            index.max_level_ = header.at("max_level").get<int>();
            if (index.ids_.size() != count || index.levels_.size() != count) corrupt("header count mismatch");
            if (!header.at("entry_point").is_null()) {
                const auto ep = header.at("entry_point").get<std::size_t>();
                if (ep >= count) corrupt("entry point out of range");
                index.entry_ = static_cast<HnswIndex::Node>(ep);
            } else if (count != 0) {
                corrupt("missing entry point");
            }
            for (std::size_t i = 0; i < count; ++i) {
                if (!index.id_to_node_.emplace(index.ids_[i], static_cast<HnswIndex::Node>(i)).second) {
                    corrupt("duplicate id");
                }
            }

            index.vectors_.resize(count * index.dimension_);
            for (float& v : index.vectors_) v = in.f32();

            index.links_.resize(count);
            for (std::size_t node = 0; node < count; ++node) {
                const int level = index.levels_[node];
                if (level < 0 || level > index.max_level_) corrupt("level out of range");
                auto& layers = index.links_[node];
                layers.resize(static_cast<std::size_t>(level) + 1);
                for (auto& list : layers) {
                    const auto degree = in.varint();
                    if (degree > count) corrupt("degree out of range");
                    list.reserve(degree);
                    std::uint64_t prev = 0;
                    for (std::uint64_t i = 0; i < degree; ++i) {
                        prev += in.varint();
                        if (prev >= count) corrupt("neighbor out of range");
                        list.push_back(static_cast<HnswIndex::Node>(prev));
                    }
                }
            }
            if (in.remaining() != 0) corrupt("trailing bytes");
            return index;
        } catch (const std::out_of_range&) {
            corrupt("truncated");
        } catch (const nlohmann::json::exception& e) {
            corrupt(std::string("bad header: ") + e.what());
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CorruptIndexFile) throw;
            corrupt(e.what());
        }
    }
};

std::vector<std::uint8_t> HnswIndex::serialize() const { return IndexCodec::encode(*this); }

HnswIndex HnswIndex::deserialize(std::span<const std::uint8_t> bytes) { return IndexCodec::decode(bytes); }

void HnswIndex::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

HnswIndex HnswIndex::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

}  // namespace vidsearch::vecindex
