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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "vidsearch/common/http_client.hpp"

namespace vidsearch::ingest {

/// Translates index text into English. Implementations throw
/// Error(TranslationUnavailable) on failure.
class Translator {
public:
    virtual ~Translator() = default;
    virtual std::string translate(std::string_view text, std::string_view source_language) const = 0;
};

class IdentityTranslator final : public Translator {
public:
    std::string translate(std::string_view text, std::string_view) const override { return std::string(text); }
};

/// Word-for-word lookup: whitespace tokens found in the glossary are
/// replaced, the rest pass through, and tokens are re-joined with one space.
class GlossaryTranslator final : public Translator {
public:
    explicit GlossaryTranslator(std::map<std::string, std::string> glossary) : glossary_(std::move(glossary)) {}
    /// Reads a flat JSON object {"source word": "english word", ...}.
    static GlossaryTranslator from_file(const std::filesystem::path& path);

    std::string translate(std::string_view text, std::string_view source_language) const override;

private:
    std::map<std::string, std::string> glossary_;
};

/// POST /translate {"text":..,"target":"en"} -> {"text":..}
class RemoteTranslator final : public Translator {
public:
    explicit RemoteTranslator(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::string translate(std::string_view text, std::string_view source_language) const override;

private:
    HttpEndpoint endpoint_;
};

struct Transcript {
    std::string text;
    std::string language;
};

/// Speech recognition runs upstream of this pipeline; the manifest normally
/// carries the transcript. A transcriber only fills records that ship raw
/// audio without one. Throws Error(TranscriptionUnavailable).
class Transcriber {
public:
    virtual ~Transcriber() = default;
    virtual Transcript transcribe(std::span<const std::uint8_t> audio) const = 0;
};

/// POST /transcribe {"audio":base64} -> {"text":..,"language":..}
class RemoteTranscriber final : public Transcriber {
public:
    explicit RemoteTranscriber(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    Transcript transcribe(std::span<const std::uint8_t> audio) const override;

private:
    HttpEndpoint endpoint_;
};

/// True for BCP-47 tags starting with "en" (case-insensitive).
bool is_english(std::string_view language);

/// transcription, description, or "transcription\ndescription"; translated to
/// English unless the language is English or the text is empty.
std::string build_index_text(std::string_view transcription, std::string_view description,
                             std::string_view language, const Translator& translator);

}  // namespace vidsearch::ingest
