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

#include <string>
#include <vector>

#include "vidsearch/common/error.hpp"
#include "vidsearch/ingest/corpus.hpp"
#include "vidsearch/ingest/manifest.hpp"
#include "vidsearch/ingest/translator.hpp"

namespace vidsearch::ingest {

struct IngestFailure {
    std::string video_id;
    ErrorCode code;
    std::string message;
};

struct IngestReport {
    std::vector<std::string> indexed;  // manifest order
    std::vector<IngestFailure> failures;
};

/// Turns manifest records into documents and feeds them to a corpus.
class Ingestor {
public:
    /// `transcriber` may be null; it is only consulted for records that carry
    /// audio but no transcription.
    Ingestor(Corpus& corpus, const Translator& translator, const Transcriber* transcriber = nullptr)
        : corpus_(corpus), translator_(translator), transcriber_(transcriber) {}

    /// Pure with respect to the corpus: samples frames, assembles and
    /// translates text, embeds both modalities. Throws EmptyRecord when
    /// neither modality yields an embedding; provider errors propagate.
    VideoDocument build_document(const VideoManifestRecord& record) const;

    /// Throws AlreadyIndexed (checked before any provider call) plus
    /// anything build_document throws.
    VideoDocument ingest_record(const VideoManifestRecord& record);

    /// Embeds records on `workers` threads, then inserts sequentially in
    /// manifest order so the index graphs match a single-threaded run. Failed
    /// records are logged and reported, never indexed.
    IngestReport ingest_manifest(const std::vector<VideoManifestRecord>& records, std::size_t workers = 1);

private:
    Corpus& corpus_;
    const Translator& translator_;
    const Transcriber* transcriber_;
};

}  // namespace vidsearch::ingest
