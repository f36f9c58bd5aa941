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
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidsearch/embedkit/embedding.hpp"

namespace vidsearch::ingest {

struct VideoDocument {
    std::string video_id;
    embedkit::Embedding vision;
    embedkit::Embedding audio;
    std::string indexed_text;
    std::string transcription;
    std::string description;
    std::string language;
    std::size_t frames_used = 0;
    std::uint64_t ordinal = 0;  // insertion position in the corpus

    friend bool operator==(const VideoDocument&, const VideoDocument&) = default;
};

nlohmann::json to_json(const VideoDocument& doc, bool with_embeddings);
/// Expects the with-embeddings form.
VideoDocument document_from_json(const nlohmann::json& j);

/// One JSON file per video id under a content directory. Writes are atomic
/// per document.
class DocumentStore {
public:
    explicit DocumentStore(std::filesystem::path dir);

    void put(const VideoDocument& doc) const;
    std::optional<VideoDocument> get(const std::string& video_id) const;
    std::vector<VideoDocument> load_all() const;

    const std::filesystem::path& dir() const { return dir_; }
    /// Percent-encodes everything outside [A-Za-z0-9_-].
    static std::string file_name(const std::string& video_id);

private:
    std::filesystem::path dir_;
};

}  // namespace vidsearch::ingest
