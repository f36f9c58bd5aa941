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

#include "vidsearch/gateway/app.hpp"

#include <spdlog/spdlog.h>

#include "vidsearch/agents/search_tool.hpp"
#include "vidsearch/common/error.hpp"
#include "vidsearch/ingest/pipeline.hpp"

namespace vidsearch::gateway {
namespace {

nlohmann::json with_schema(nlohmann::json body) {
    body["schema_version"] = kSchemaVersion;
    return body;
}

nlohmann::json scored_json(const fusion::ScoredVideo& v) {
    return {{"video_id", v.video_id}, {"vision", v.vision}, {"audio", v.audio}, {"fused", v.fused}, {"rank", v.rank}};
}

nlohmann::json session_video_json(const agents::SessionVideo& v) {
    return {{"video_id", v.video_id}, {"transcription", v.transcription}, {"description", v.description},
            {"vision", v.vision},     {"audio", v.audio},                   {"fused", v.fused},
            {"fused_rank", v.fused_rank}, {"rank", v.rank},                 {"summary", v.summary}};
}

/// Typed field access that turns a wrong type into BadRequest.
template <typename T>
std::optional<T> field(const nlohmann::json& body, const char* name) {
    if (!body.contains(name) || body.at(name).is_null()) return std::nullopt;
    try {
        return body.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        raise(ErrorCode::BadRequest, std::string("field '") + name + "' has the wrong type");
    }
}

void require_object(const nlohmann::json& body) {
    if (!body.is_object()) raise(ErrorCode::BadRequest, "request body must be a JSON object");
}

template <typename F>
Response guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return error_response(e.code(), e.what());
    } catch (const std::exception& e) {
        spdlog::error("request failed: {}", e.what());
        return error_response(ErrorCode::Io, e.what());
    }
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::BadK:
        case ErrorCode::BadRequest:
        case ErrorCode::BadManifest:
        case ErrorCode::EmptyRecord:
        case ErrorCode::EmptyQuery:
        case ErrorCode::EmptyFrameSet:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::UnknownVideoSelected:
            return 400;
        case ErrorCode::NotFound:
        case ErrorCode::UnknownSession:
            return 404;
        case ErrorCode::EmptyCorpus:
        case ErrorCode::AlreadyIndexed:
            return 409;
        case ErrorCode::RemoteEmbedderUnavailable:
        case ErrorCode::TranslationUnavailable:
        case ErrorCode::TranscriptionUnavailable:
        case ErrorCode::LlmUnavailable:
            return 503;
        default:
            return 500;
    }
}

Response error_response(ErrorCode code, const std::string& message) {
    return {http_status(code), with_schema({{"error", {{"code", std::string(to_string(code))}, {"message", message}}}})};
}

std::unique_ptr<ingest::Translator> make_translator(const TranslatorConfig& cfg) {
    switch (cfg.kind) {
        case TranslatorKind::Glossary:
            return std::make_unique<ingest::GlossaryTranslator>(ingest::GlossaryTranslator::from_file(cfg.glossary));
        case TranslatorKind::Remote:
            return std::make_unique<ingest::RemoteTranslator>(cfg.endpoint);
        case TranslatorKind::Identity:
            break;
    }
    return std::make_unique<ingest::IdentityTranslator>();
}

App::App(AppConfig cfg, agents::Clock clock, agents::IdGenerator ids) : cfg_(std::move(cfg)) {
    cfg_.finalize();
    if (const auto stored = ingest::Corpus::stored_config(cfg_.data_dir)) {
        if (!stored->compatible_with(cfg_.corpus)) {
            spdlog::warn("{} was built with {}; using the stored index-time settings", cfg_.data_dir.string(),
                         stored->to_json().dump());
        }
        corpus_ = ingest::Corpus::open_existing(cfg_.data_dir, cfg_.corpus.embedder);
        cfg_.corpus = corpus_->config();
    } else {
        corpus_ = ingest::Corpus::open(cfg_.data_dir, cfg_.corpus);
    }
    sessions_ = agents::SessionStore::open(cfg_.effective_sessions_dir(), std::move(clock), std::move(ids));
    translator_ = make_translator(cfg_.translator);
    if (cfg_.asr) transcriber_ = std::make_unique<ingest::RemoteTranscriber>(*cfg_.asr);
    routing_llm_ = rerank::make_llm(cfg_.routing_llm);
    search_llm_ = rerank::make_llm(cfg_.search_llm);
    chat_llm_ = rerank::make_llm(cfg_.chat_llm);
    runner_ = std::make_unique<agents::AgentRunner>(*corpus_, agents::AgentLlms{*routing_llm_, *search_llm_, *chat_llm_},
                                                    cfg_.agent, *sessions_);
    spdlog::info("corpus {} holds {} videos, {} sessions", cfg_.data_dir.string(), corpus_->size(), sessions_->size());
}

App::~App() = default;

Response App::health() const {
    return {200, with_schema({{"status", "ok"}, {"videos", corpus_->size()}})};
}

Response App::index(const nlohmann::json& body) {
    return guarded([&]() -> Response {
        require_object(body);
        const auto record = ingest::parse_manifest_record(body, std::filesystem::current_path());
        if (corpus_->contains(record.video_id)) {
            return {200, with_schema({{"video_id", record.video_id}, {"status", "already_indexed"}})};
        }
        ingest::Ingestor ingestor(*corpus_, *translator_, transcriber_.get());
        try {
            const auto doc = ingestor.ingest_record(record);
            return {201, with_schema({{"video_id", doc.video_id},
                                      {"status", "indexed"},
                                      {"ordinal", doc.ordinal},
                                      {"vision_missing", doc.vision.missing},
                                      {"audio_missing", doc.audio.missing}})};
        } catch (const Error& e) {
            // A concurrent request indexed the same id first.
            if (e.code() != ErrorCode::AlreadyIndexed) throw;
            return {200, with_schema({{"video_id", record.video_id}, {"status", "already_indexed"}})};
        }
    });
}

Response App::search(const nlohmann::json& body) const {
    return guarded([&]() -> Response {
        require_object(body);
        const auto query = field<std::string>(body, "query");
        if (!query) raise(ErrorCode::BadRequest, "missing field 'query'");
        auto fc = cfg_.fusion;
        if (const auto k = field<long long>(body, "k")) {
            if (*k <= 0) raise(ErrorCode::BadK, "k must be >= 1");
            fc.k = static_cast<std::size_t>(*k);
        }
        fc.m_cand = std::max(fc.m_cand, fc.k);
        if (const auto alpha = field<double>(body, "alpha")) fc.alpha = *alpha;
        const bool use_rerank = field<bool>(body, "rerank").value_or(cfg_.search_rerank);
        const auto found = agents::search_videos(*corpus_, *query, fc, use_rerank ? search_llm_.get() : nullptr);
        nlohmann::json results = nlohmann::json::array();
        for (const auto& v : found.videos) results.push_back(scored_json(v));
        return {200, with_schema({{"results", std::move(results)},
                                  {"reranked", found.reranked},
                                  {"rerank_degraded", found.rerank_degraded}})};
    });
}

Response App::create_session() {
    return guarded([&]() -> Response { return {201, with_schema({{"session_id", sessions_->create()}})}; });
}

Response App::post_message(const std::string& session_id, const nlohmann::json& body) {
    return guarded([&]() -> Response {
        require_object(body);
        const auto text = field<std::string>(body, "text");
        if (!text) raise(ErrorCode::BadRequest, "missing field 'text'");
        const auto selected = field<std::vector<std::string>>(body, "selected_video_ids");
        const auto turn = runner_->handle_message(session_id, *text, selected);
        nlohmann::json out = {{"assistant", turn.assistant},
                              {"route", agents::to_string(turn.route.target)},
                              {"route_fallback", turn.route.fallback_used},
                              {"rerank_degraded", turn.rerank_degraded},
                              {"chat_degraded", turn.chat_degraded}};
        if (turn.route.target == agents::RouteTarget::Search) {
            nlohmann::json videos = nlohmann::json::array();
            for (const auto& v : turn.videos) videos.push_back(session_video_json(v));
            out["videos"] = std::move(videos);
        }
        return {200, with_schema(std::move(out))};
    });
}

Response App::get_video(const std::string& video_id, bool with_embeddings) const {
    return guarded([&]() -> Response {
        const auto doc = corpus_->find(video_id);
        if (!doc) raise(ErrorCode::NotFound, "unknown video '" + video_id + "'");
        return {200, with_schema(ingest::to_json(*doc, with_embeddings))};
    });
}

void App::flush() { corpus_->flush(); }

}  // namespace vidsearch::gateway
