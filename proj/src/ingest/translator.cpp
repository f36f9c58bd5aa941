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

#include "vidsearch/ingest/translator.hpp"

#include <cctype>

#include <json.hpp>

#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::ingest {

GlossaryTranslator GlossaryTranslator::from_file(const std::filesystem::path& path) {
    const auto parsed = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        raise(ErrorCode::Config, "glossary " + path.string() + " is not a JSON object");
    }
    std::map<std::string, std::string> glossary;
    for (const auto& [key, value] : parsed.items()) {
        if (!value.is_string()) raise(ErrorCode::Config, "glossary entry '" + key + "' is not a string");
        glossary.emplace(key, value.get<std::string>());
    }
    return GlossaryTranslator(std::move(glossary));
}

std::string GlossaryTranslator::translate(std::string_view text, std::string_view) const {
    std::string out;
    for (const auto& token : split_whitespace(text)) {
        if (!out.empty()) out.push_back(' ');
        const auto it = glossary_.find(token);
        out += it == glossary_.end() ? token : it->second;
    }
    return out;
}

std::string RemoteTranslator::translate(std::string_view text, std::string_view) const {
    try {
        const auto response = post_json(endpoint_, "/translate", {{"text", std::string(text)}, {"target", "en"}});
        const auto it = response.find("text");
        if (it == response.end() || !it->is_string()) {
            raise(ErrorCode::TranslationUnavailable, "translator response lacks a text field");
        }
        return it->get<std::string>();
    } catch (const HttpCallError& e) {
        raise(ErrorCode::TranslationUnavailable, e.what());
    }
}

Transcript RemoteTranscriber::transcribe(std::span<const std::uint8_t> audio) const {
    try {
        const auto response = post_json(endpoint_, "/transcribe", {{"audio", base64_encode(audio)}});
        if (!response.contains("text") || !response["text"].is_string()) {
            raise(ErrorCode::TranscriptionUnavailable, "transcriber response lacks a text field");
        }
        return {response["text"].get<std::string>(), response.value("language", std::string("und"))};
    } catch (const HttpCallError& e) {
        raise(ErrorCode::TranscriptionUnavailable, e.what());
    }
}

bool is_english(std::string_view language) {
    return language.size() >= 2 && std::tolower(static_cast<unsigned char>(language[0])) == 'e' &&
           std::tolower(static_cast<unsigned char>(language[1])) == 'n';
}

std::string build_index_text(std::string_view transcription, std::string_view description,
                             std::string_view language, const Translator& translator) {
    std::string combined;
    if (description.empty()) {
        combined = transcription;
    } else if (transcription.empty()) {
        combined = description;
    } else {
        combined.reserve(transcription.size() + 1 + description.size());
        combined.append(transcription).append("\n").append(description);
    }
    if (combined.empty() || is_english(language)) return combined;
    return translator.translate(combined, language);
}

}  // namespace vidsearch::ingest
