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

#include "vidsearch/common/error.hpp"

namespace vidsearch {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Config: return "Config";
        case ErrorCode::RemoteEmbedderUnavailable: return "RemoteEmbedderUnavailable";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyFrameSet: return "EmptyFrameSet";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::CorruptIndexFile: return "CorruptIndexFile";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::TranslationUnavailable: return "TranslationUnavailable";
        case ErrorCode::TranscriptionUnavailable: return "TranscriptionUnavailable";
        case ErrorCode::AlreadyIndexed: return "AlreadyIndexed";
        case ErrorCode::EmptyRecord: return "EmptyRecord";
        case ErrorCode::BadManifest: return "BadManifest";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::EmptyQuery: return "EmptyQuery";
        case ErrorCode::LlmUnavailable: return "LlmUnavailable";
        case ErrorCode::UnknownVideoSelected: return "UnknownVideoSelected";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::CorruptArchive: return "CorruptArchive";
        case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
        case ErrorCode::NameSetMismatch: return "NameSetMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteResult: return "NonFiniteResult";
        case ErrorCode::NoRelevant: return "NoRelevant";
        case ErrorCode::BadK: return "BadK";
        case ErrorCode::BadRequest: return "BadRequest";
    }
    return "Unknown";
}

}  // namespace vidsearch
