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

#include "vidsearch/ingest/manifest.hpp"

#include <fstream>

#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::ingest {

namespace {

constexpr std::string_view kInlinePrefix = "base64:";

std::vector<std::uint8_t> resolve_payload(const std::string& ref, const std::filesystem::path& base_dir) {
    if (ref.starts_with(kInlinePrefix)) return base64_decode(std::string_view(ref).substr(kInlinePrefix.size()));
    std::filesystem::path p(ref);
    if (p.is_relative()) p = base_dir / p;
    return read_file(p);
}

std::string string_field(const nlohmann::json& line, const char* key) {
    const auto it = line.find(key);
    if (it == line.end() || it->is_null()) return {};
    if (!it->is_string()) raise(ErrorCode::BadManifest, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

void VideoManifestRecord::validate() const {
    if (video_id.empty()) raise(ErrorCode::BadManifest, "video_id must be non-empty");
    if (frames.empty() && is_blank(transcription) && is_blank(description) && !audio) {
        raise(ErrorCode::EmptyRecord, "record '" + video_id + "' has no frames and no text");
    }
}

VideoManifestRecord parse_manifest_record(const nlohmann::json& line, const std::filesystem::path& base_dir) {
    if (!line.is_object()) raise(ErrorCode::BadManifest, "manifest record must be a JSON object");
    VideoManifestRecord rec;
    rec.video_id = string_field(line, "video_id");
    rec.transcription = string_field(line, "transcription");
    rec.description = string_field(line, "description");
    rec.language = string_field(line, "language");
    if (rec.language.empty()) rec.language = "und";
    if (const auto it = line.find("frames"); it != line.end() && !it->is_null()) {
        if (!it->is_array()) raise(ErrorCode::BadManifest, "field 'frames' must be an array");
        for (const auto& f : *it) {
            if (!f.is_string()) raise(ErrorCode::BadManifest, "frame references must be strings");
            try {
                rec.frames.push_back(resolve_payload(f.get<std::string>(), base_dir));
            } catch (const Error& e) {
                raise(ErrorCode::BadManifest, "frame for '" + rec.video_id + "': " + e.what());
            }
        }
    }
    if (const auto audio = string_field(line, "audio"); !audio.empty()) {
        try {
            rec.audio = resolve_payload(audio, base_dir);
        } catch (const Error& e) {
            raise(ErrorCode::BadManifest, "audio for '" + rec.video_id + "': " + e.what());
        }
    }
    return rec;
}

std::vector<VideoManifestRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::Io, "cannot open manifest " + path.string());
    const auto base_dir = path.parent_path();
    std::vector<VideoManifestRecord> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (is_blank(line)) continue;
        const auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded()) raise(ErrorCode::BadManifest, path.string() + ":" + std::to_string(lineno) + ": invalid JSON");
        try {
            out.push_back(parse_manifest_record(parsed, base_dir));
        } catch (const Error& e) {
            raise(ErrorCode::BadManifest, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace vidsearch::ingest
