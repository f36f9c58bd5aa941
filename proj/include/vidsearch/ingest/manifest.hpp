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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidsearch/embedkit/embedding.hpp"

namespace vidsearch::ingest {

/// One manifest line:
///   {"video_id":str, "frames":[path | "base64:...", ...], "transcription":str,
///    "description":str, "language":str, "audio":path|"base64:..." (optional)}
/// Frames are opaque pre-extracted payloads; relative paths resolve against
/// the manifest's directory.
struct VideoManifestRecord {
    std::string video_id;
    std::vector<embedkit::Frame> frames;
    std::string transcription;
    std::string description;
    std::string language = "und";
    std::optional<std::vector<std::uint8_t>> audio;

    /// BadManifest for an empty id; EmptyRecord when there is nothing to
    /// embed (no frames, no text, no audio).
    void validate() const;
};

VideoManifestRecord parse_manifest_record(const nlohmann::json& line, const std::filesystem::path& base_dir);

/// Reads a JSONL manifest; blank lines are skipped. Throws BadManifest naming
/// the offending line.
std::vector<VideoManifestRecord> read_manifest(const std::filesystem::path& path);

}  // namespace vidsearch::ingest
