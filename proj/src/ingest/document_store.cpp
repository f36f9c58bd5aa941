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

#include "vidsearch/ingest/document_store.hpp"

#include <algorithm>
#include <cstdio>

#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/common/error.hpp"

namespace vidsearch::ingest {

namespace {

nlohmann::json embedding_json(const embedkit::Embedding& e) {
    return {{"missing", e.missing}, {"values", e.values}};
}

embedkit::Embedding embedding_from(const nlohmann::json& j) {
    return {j.at("values").get<std::vector<float>>(), j.at("missing").get<bool>()};
}

}  // namespace

nlohmann::json to_json(const VideoDocument& doc, bool with_embeddings) {
    nlohmann::json j = {
        {"video_id", doc.video_id},
        {"indexed_text", doc.indexed_text},
        {"transcription", doc.transcription},
        {"description", doc.description},
        {"language", doc.language},
        {"frames_used", doc.frames_used},
        {"ordinal", doc.ordinal},
        {"vision_missing", doc.vision.missing},
        {"audio_missing", doc.audio.missing},
    };
    if (with_embeddings) {
        j["vision"] = embedding_json(doc.vision);
        j["audio"] = embedding_json(doc.audio);
    }
    return j;
}

VideoDocument document_from_json(const nlohmann::json& j) {
    VideoDocument doc;
    doc.video_id = j.at("video_id").get<std::string>();
    doc.indexed_text = j.at("indexed_text").get<std::string>();
    doc.transcription = j.at("transcription").get<std::string>();
    doc.description = j.at("description").get<std::string>();
    doc.language = j.at("language").get<std::string>();
    doc.frames_used = j.at("frames_used").get<std::size_t>();
    doc.ordinal = j.at("ordinal").get<std::uint64_t>();
    doc.vision = embedding_from(j.at("vision"));
    doc.audio = embedding_from(j.at("audio"));
    return doc;
}

DocumentStore::DocumentStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string DocumentStore::file_name(const std::string& video_id) {
    std::string out;
    for (unsigned char c : video_id) {
        if (std::isalnum(c) || c == '_' || c == '-') {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", c);
            out += buf;
        }
    }
    return out + ".json";
}

void DocumentStore::put(const VideoDocument& doc) const {
    write_file_atomic(dir_ / file_name(doc.video_id), to_json(doc, true).dump() + "\n");
}

std::optional<VideoDocument> DocumentStore::get(const std::string& video_id) const {
    const auto path = dir_ / file_name(video_id);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        return document_from_json(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::Io, "corrupt document " + path.string() + ": " + e.what());
    }
}

std::vector<VideoDocument> DocumentStore::load_all() const {
    std::vector<VideoDocument> docs;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.path().extension() != ".json") continue;
        try {
            docs.push_back(document_from_json(nlohmann::json::parse(read_text_file(entry.path()))));
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::Io, "corrupt document " + entry.path().string() + ": " + e.what());
        }
    }
    std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.ordinal < b.ordinal; });
    return docs;
}

}  // namespace vidsearch::ingest
