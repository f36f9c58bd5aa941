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

#include "vidsearch/ingest/corpus.hpp"

#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/common/error.hpp"

namespace vidsearch::ingest {

namespace {

constexpr const char* kConfigFile = "corpus.json";
constexpr const char* kVisionFile = "vision.idx";
constexpr const char* kAudioFile = "audio.idx";
constexpr const char* kContentDir = "content";

std::string kind_name(embedkit::ProviderKind k) { return k == embedkit::ProviderKind::Remote ? "remote" : "reference"; }

CorpusConfig config_from_json(const nlohmann::json& j) {
    CorpusConfig cfg;
    cfg.embedder.dimension = j.at("dimension").get<std::size_t>();
    const auto kind = j.at("embedder").get<std::string>();
    if (kind == "reference") {
        cfg.embedder.kind = embedkit::ProviderKind::Reference;
    } else if (kind == "remote") {
        cfg.embedder.kind = embedkit::ProviderKind::Remote;
    } else {
        raise(ErrorCode::Config, "unknown embedder kind '" + kind + "'");
    }
    const auto& idx = j.at("index");
    cfg.index.m = idx.at("m").get<std::size_t>();
    cfg.index.ef_construction = idx.at("ef_construction").get<std::size_t>();
    cfg.index.seed = idx.at("seed").get<std::uint64_t>();
    cfg.ingest.frames_per_video = j.at("frames_per_video").get<std::size_t>();
    cfg.ingest.use_description = j.at("use_description").get<bool>();
    return cfg;
}

vecindex::HnswIndex load_or_create(const std::filesystem::path& path, const CorpusConfig& cfg) {
    if (!std::filesystem::exists(path)) return vecindex::HnswIndex(cfg.embedder.dimension, cfg.index);
    auto index = vecindex::HnswIndex::load(path);
    if (index.dimension() != cfg.embedder.dimension) {
        raise(ErrorCode::CorruptIndexFile, path.string() + " has dimension " + std::to_string(index.dimension()) +
                                               ", corpus expects " + std::to_string(cfg.embedder.dimension));
    }
    return index;
}

}  // namespace

void CorpusConfig::validate() const {
    embedder.validate();
    index.validate();
    if (ingest.frames_per_video == 0) raise(ErrorCode::Config, "frames_per_video must be >= 1");
}

nlohmann::json CorpusConfig::to_json() const {
    return {
        {"dimension", embedder.dimension},
        {"embedder", kind_name(embedder.kind)},
        {"index", {{"m", index.m}, {"ef_construction", index.ef_construction}, {"seed", index.seed}}},
        {"frames_per_video", ingest.frames_per_video},
        {"use_description", ingest.use_description},
    };
}

bool CorpusConfig::compatible_with(const CorpusConfig& other) const { return to_json() == other.to_json(); }

Corpus::Corpus(std::filesystem::path data_dir, CorpusConfig cfg)
    : data_dir_(std::move(data_dir)),
      config_(std::move(cfg)),
      embedder_(embedkit::make_embedder(config_.embedder)),
      store_(data_dir_ / kContentDir),
      vision_(load_or_create(data_dir_ / kVisionFile, config_)),
      audio_(load_or_create(data_dir_ / kAudioFile, config_)) {}

std::optional<CorpusConfig> Corpus::stored_config(const std::filesystem::path& data_dir) {
    const auto path = data_dir / kConfigFile;
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        return config_from_json(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::Config, "corrupt " + path.string() + ": " + e.what());
    }
}

std::unique_ptr<Corpus> Corpus::open(const std::filesystem::path& data_dir, const CorpusConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(data_dir);
    CorpusConfig effective = cfg;
    if (const auto stored = stored_config(data_dir)) {
        if (!stored->compatible_with(cfg)) {
            raise(ErrorCode::Config, "data directory " + data_dir.string() + " was built with " +
                                         stored->to_json().dump() + ", requested " + cfg.to_json().dump());
        }
    } else {
        write_file_atomic(data_dir / kConfigFile, cfg.to_json().dump(1) + "\n");
    }
    std::unique_ptr<Corpus> corpus(new Corpus(data_dir, effective));
    corpus->recover();
    return corpus;
}

std::unique_ptr<Corpus> Corpus::open_existing(const std::filesystem::path& data_dir,
                                              const embedkit::EmbedderConfig& runtime_embedder) {
    CorpusConfig cfg;
    if (auto stored = stored_config(data_dir)) cfg = *stored;
    cfg.embedder.remote = runtime_embedder.remote;
    return open(data_dir, cfg);
}

void Corpus::recover() {
    bool dirty = false;
    for (auto& doc : store_.load_all()) {
        if (doc.vision.dimension() != config_.embedder.dimension ||
            doc.audio.dimension() != config_.embedder.dimension) {
            raise(ErrorCode::DimensionMismatch, "stored document '" + doc.video_id + "' has the wrong dimension");
        }
        if (!doc.vision.missing && !vision_.contains(doc.video_id)) {
            vision_.insert({doc.video_id, doc.vision});
            dirty = true;
        }
        if (!doc.audio.missing && !audio_.contains(doc.video_id)) {
            audio_.insert({doc.video_id, doc.audio});
            dirty = true;
        }
        next_ordinal_ = std::max(next_ordinal_, doc.ordinal + 1);
        auto id = doc.video_id;
        docs_.emplace(std::move(id), std::move(doc));
    }
    if (dirty) flush();
}

std::size_t Corpus::size() const {
    std::shared_lock lock(mutex_);
    return docs_.size();
}

bool Corpus::contains(const std::string& video_id) const {
    std::shared_lock lock(mutex_);
    return docs_.contains(video_id);
}

std::optional<VideoDocument> Corpus::find(const std::string& video_id) const {
    std::shared_lock lock(mutex_);
    const auto it = docs_.find(video_id);
    if (it == docs_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Corpus::video_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> ids;
    ids.reserve(docs_.size());
    for (const auto& [id, doc] : docs_) ids.push_back(id);
    return ids;
}

const VideoDocument& Corpus::add(VideoDocument doc, bool save_indexes) {
    if (doc.vision.missing && doc.audio.missing) {
        raise(ErrorCode::EmptyRecord, "document '" + doc.video_id + "' has no embeddable modality");
    }
    const auto dim = config_.embedder.dimension;
    if (doc.vision.dimension() != dim || doc.audio.dimension() != dim) {
        raise(ErrorCode::DimensionMismatch, "document '" + doc.video_id + "' does not match corpus dimension " +
                                                std::to_string(dim));
    }
    std::unique_lock lock(mutex_);
    if (docs_.contains(doc.video_id)) raise(ErrorCode::AlreadyIndexed, "video '" + doc.video_id + "' is already indexed");
    doc.ordinal = next_ordinal_;
    store_.put(doc);
    if (!doc.vision.missing) vision_.insert({doc.video_id, doc.vision});
    if (!doc.audio.missing) audio_.insert({doc.video_id, doc.audio});
    ++next_ordinal_;
    auto id = doc.video_id;
    const auto& stored = docs_.emplace(std::move(id), std::move(doc)).first->second;
    if (save_indexes) {
        vision_.save(data_dir_ / kVisionFile);
        audio_.save(data_dir_ / kAudioFile);
    }
    return stored;
}

void Corpus::flush() const {
    std::shared_lock lock(mutex_);
    vision_.save(data_dir_ / kVisionFile);
    audio_.save(data_dir_ / kAudioFile);
}

const VideoDocument* Corpus::ReadView::document(const std::string& video_id) const {
    const auto it = corpus_->docs_.find(video_id);
    return it == corpus_->docs_.end() ? nullptr : &it->second;
}

}  // namespace vidsearch::ingest
