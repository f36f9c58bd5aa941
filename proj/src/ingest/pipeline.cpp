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

#include "vidsearch/ingest/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <set>
#include <thread>
#include <variant>

#include <spdlog/spdlog.h>

#include "vidsearch/common/text.hpp"
#include "vidsearch/ingest/frame_sampling.hpp"

namespace vidsearch::ingest {

VideoDocument Ingestor::build_document(const VideoManifestRecord& record) const {
    record.validate();
    const auto& cfg = corpus_.config().ingest;
    const auto& embedder = corpus_.embedder();

    std::string transcription = record.transcription;
    std::string language = record.language;
    if (is_blank(transcription) && record.audio && transcriber_ != nullptr) {
        auto transcript = transcriber_->transcribe(*record.audio);
        transcription = std::move(transcript.text);
        if ((language.empty() || language == "und") && !transcript.language.empty()) {
            language = std::move(transcript.language);
        }
    }

    VideoDocument doc;
    doc.video_id = record.video_id;
    doc.transcription = transcription;
    doc.description = record.description;
    doc.language = language;

    std::vector<embedkit::Frame> sampled;
    for (const auto i : sample_frame_indices(record.frames.size(), cfg.frames_per_video)) {
        sampled.push_back(record.frames[i]);
    }
    doc.frames_used = sampled.size();
    doc.vision = sampled.empty() ? embedkit::Embedding::zeros(embedder.dimension()) : embedder.embed_frames(sampled);

    const std::string_view description = cfg.use_description ? std::string_view(record.description) : "";
    doc.indexed_text = build_index_text(transcription, description, language, translator_);
    doc.audio = embedder.embed_text(doc.indexed_text);

    if (doc.vision.missing && doc.audio.missing) {
        raise(ErrorCode::EmptyRecord, "record '" + record.video_id + "' produced no embedding");
    }
    return doc;
}

VideoDocument Ingestor::ingest_record(const VideoManifestRecord& record) {
    if (corpus_.contains(record.video_id)) {
        raise(ErrorCode::AlreadyIndexed, "video '" + record.video_id + "' is already indexed");
    }
    return corpus_.add(build_document(record));
}

IngestReport Ingestor::ingest_manifest(const std::vector<VideoManifestRecord>& records, std::size_t workers) {
    using Outcome = std::variant<std::monostate, VideoDocument, IngestFailure>;
    std::vector<Outcome> outcomes(records.size());

    std::set<std::string> seen;
    std::vector<bool> skip(records.size(), false);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& id = records[i].video_id;
        if (!seen.insert(id).second || corpus_.contains(id)) {
            outcomes[i] = IngestFailure{id, ErrorCode::AlreadyIndexed, "video '" + id + "' is already indexed"};
            skip[i] = true;
        }
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < records.size(); i = next++) {
            if (skip[i]) continue;
            try {
                outcomes[i] = build_document(records[i]);
            } catch (const Error& e) {
                outcomes[i] = IngestFailure{records[i].video_id, e.code(), e.what()};
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, records.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    IngestReport report;
    for (auto& outcome : outcomes) {
        if (auto* doc = std::get_if<VideoDocument>(&outcome)) {
            auto id = doc->video_id;
            try {
                corpus_.add(std::move(*doc), false);
                report.indexed.push_back(std::move(id));
            } catch (const Error& e) {
                report.failures.push_back({std::move(id), e.code(), e.what()});
            }
        } else if (auto* failure = std::get_if<IngestFailure>(&outcome)) {
            report.failures.push_back(std::move(*failure));
        }
    }
    corpus_.flush();
    for (const auto& f : report.failures) {
        spdlog::warn("skipped '{}': {} ({})", f.video_id, f.message, to_string(f.code));
    }
    return report;
}

}  // namespace vidsearch::ingest
