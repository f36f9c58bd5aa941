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

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "vidsearch/agents/agents.hpp"
#include "vidsearch/agents/session.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/gateway/config.hpp"
#include "vidsearch/ingest/translator.hpp"

namespace vidsearch::gateway {

inline constexpr int kSchemaVersion = 1;

struct Response {
    int status = 200;
    nlohmann::json body;
};

/// HTTP status for an error code (400 validation, 404 unknown ids, 409 empty
/// corpus, 503 provider outage, 500 otherwise).
int http_status(ErrorCode code);
/// {"schema_version", "error": {"code", "message"}}
Response error_response(ErrorCode code, const std::string& message);

/// Owns the corpus, session store, providers and agent runner for one data
/// directory, and implements each endpoint as a plain function of the
/// decoded request. Handlers never throw; failures become error responses.
///
/// An existing data directory keeps the index-time settings it was built
/// with (dimension, index params, frames, description); the config only
/// supplies them for a new directory.
class App {
public:
    explicit App(AppConfig cfg, agents::Clock clock = agents::utc_now, agents::IdGenerator ids = agents::random_session_id);
    ~App();

    const AppConfig& config() const { return cfg_; }
    ingest::Corpus& corpus() { return *corpus_; }

    Response health() const;
    /// Body: one manifest record. 201 when indexed, 200 when the id was
    /// already present (idempotent retry).
    Response index(const nlohmann::json& body);
    /// Body: {"query", "k", "alpha"?, "rerank"?}. Read-only.
    Response search(const nlohmann::json& body) const;
    Response create_session();
    /// Body: {"text", "selected_video_ids"?}.
    Response post_message(const std::string& session_id, const nlohmann::json& body);
    Response get_video(const std::string& video_id, bool with_embeddings) const;

    /// Writes index files; called on shutdown.
    void flush();

private:
    AppConfig cfg_;
    std::unique_ptr<ingest::Corpus> corpus_;
    std::unique_ptr<agents::SessionStore> sessions_;
    std::unique_ptr<ingest::Translator> translator_;
    std::unique_ptr<ingest::Transcriber> transcriber_;
    std::unique_ptr<rerank::LlmClient> routing_llm_;
    std::unique_ptr<rerank::LlmClient> search_llm_;
    std::unique_ptr<rerank::LlmClient> chat_llm_;
    std::unique_ptr<agents::AgentRunner> runner_;
};

std::unique_ptr<ingest::Translator> make_translator(const TranslatorConfig& cfg);

}  // namespace vidsearch::gateway
