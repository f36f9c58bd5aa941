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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidsearch/embedkit/embedding.hpp"
#include "vidsearch/ingest/document_store.hpp"
#include "vidsearch/ingest/frame_sampling.hpp"
#include "vidsearch/vecindex/hnsw_index.hpp"

namespace vidsearch::ingest {

/// Index-time settings. They shape the stored vectors, so a corpus directory
/// is bound to the values it was created with.
struct IngestConfig {
    std::size_t frames_per_video = kDefaultFramesPerVideo;
    bool use_description = true;

    friend bool operator==(const IngestConfig&, const IngestConfig&) = default;
};

struct CorpusConfig {
    embedkit::EmbedderConfig embedder;
    vecindex::IndexParams index;
    IngestConfig ingest;

    void validate() const;
    /// The persisted subset (no endpoints or timeouts).
    nlohmann::json to_json() const;
    /// True when the persisted fields agree; ef_search is query-time and ignored.
    bool compatible_with(const CorpusConfig& other) const;
};

/// Documents plus the vision and audio-text indexes of one data directory:
///   corpus.json, content/<id>.json, vision.idx, audio.idx
///
/// Reader-writer locked: searches share, add() is exclusive.
class Corpus {
public:
    /// Opens or creates `data_dir`. An existing directory keeps its stored
    /// config; runtime-only fields (endpoints, ef_search) come from `cfg`.
    /// Throws Config when the stored config conflicts with `cfg`. Documents
    /// missing from an index file (interrupted write) are re-inserted in
    /// ordinal order.
    static std::unique_ptr<Corpus> open(const std::filesystem::path& data_dir, const CorpusConfig& cfg);
    /// Opens with whatever config the directory was created with.
    static std::unique_ptr<Corpus> open_existing(const std::filesystem::path& data_dir,
                                                 const embedkit::EmbedderConfig& runtime_embedder = {});
    /// Reads only corpus.json, if present.
    static std::optional<CorpusConfig> stored_config(const std::filesystem::path& data_dir);

    const CorpusConfig& config() const { return config_; }
    const embedkit::Embedder& embedder() const { return *embedder_; }
    const std::filesystem::path& data_dir() const { return data_dir_; }

    std::size_t size() const;
    bool contains(const std::string& video_id) const;
    std::optional<VideoDocument> find(const std::string& video_id) const;
    std::vector<std::string> video_ids() const;

    /// Assigns the ordinal, inserts non-missing embeddings and writes the
    /// document. Index files are rewritten unless `save_indexes` is false, in
    /// which case a later flush() (or recovery on the next open) covers them.
    /// Throws AlreadyIndexed or EmptyRecord.
    const VideoDocument& add(VideoDocument doc, bool save_indexes = true);
    void flush() const;

    /// Shared view for a consistent multi-step read (e.g. one fused search).
    class ReadView {
    public:
        const vecindex::HnswIndex& vision() const { return corpus_->vision_; }
        const vecindex::HnswIndex& audio() const { return corpus_->audio_; }
        const VideoDocument* document(const std::string& video_id) const;
        std::size_t size() const { return corpus_->docs_.size(); }
        const std::map<std::string, VideoDocument>& documents() const { return corpus_->docs_; }

    private:
        friend class Corpus;
        explicit ReadView(const Corpus* c) : corpus_(c), lock_(c->mutex_) {}
        const Corpus* corpus_;
        std::shared_lock<std::shared_mutex> lock_;
    };
    ReadView read() const { return ReadView(this); }

private:
    Corpus(std::filesystem::path data_dir, CorpusConfig cfg);
    void recover();

    std::filesystem::path data_dir_;
    CorpusConfig config_;
    std::unique_ptr<embedkit::Embedder> embedder_;
    DocumentStore store_;
    vecindex::HnswIndex vision_;
    vecindex::HnswIndex audio_;
    std::map<std::string, VideoDocument> docs_;
    std::uint64_t next_ordinal_ = 0;
    mutable std::shared_mutex mutex_;
};

}  // namespace vidsearch::ingest
