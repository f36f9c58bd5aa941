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

#include "vidsearch/gateway/config.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include "vidsearch/common/error.hpp"
#include "vidsearch/rerank/reranker.hpp"

extern char** environ;

namespace vidsearch::gateway {
namespace {

const std::vector<std::string_view> kKeys = {
    "data_dir",          "sessions.dir",        "http.bind",
    "embedder.kind",     "embedder.dimension",  "embedder.endpoint",
    "index.m",           "index.ef_construction", "index.ef_search",
    "index.seed",        "ingest.frames",       "ingest.description",
    "ingest.workers",    "fusion.alpha",        "fusion.m_cand",
    "fusion.k",          "search.rerank",       "agent.rerank",
    "agent.history_turns", "agent.summary_chars", "llm.routing.kind",
    "llm.routing.model", "llm.routing.endpoint", "llm.routing.script",
    "llm.search.kind",   "llm.search.model",    "llm.search.endpoint",
    "llm.search.script", "llm.chat.kind",       "llm.chat.model",
    "llm.chat.endpoint", "llm.chat.script",     "translator.kind",
    "translator.glossary", "translator.endpoint", "asr.endpoint",
    "provider.timeout_ms", "provider.retries",  "prompt.route",
    "prompt.rerank",     "prompt.chat",         "prompt.summary",
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    raise(ErrorCode::Config,
          "config key '" + std::string(key) + "': '" + std::string(value) + "' is not " + std::string(expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || end != value.data() + value.size()) bad_value(key, value, "a number");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    bad_value(key, value, "a boolean");
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base_dir) {
    std::filesystem::path p{std::string(value)};
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

void check_prompt(std::string_view key, std::string_view value, std::string_view supported) {
    if (value != supported) bad_value(key, value, "the supported version " + std::string(supported));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

const std::vector<std::string_view>& AppConfig::keys() { return kKeys; }

std::string env_name(std::string_view key) {
    std::string out = "VAGENT_";
    for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void AppConfig::set(std::string_view key, std::string_view value, const std::filesystem::path& base_dir) {
    if (key == "data_dir") {
        data_dir = resolve(value, base_dir);
    } else if (key == "sessions.dir") {
        sessions_dir = resolve(value, base_dir);
    } else if (key == "http.bind") {
        const auto colon = value.rfind(':');
        if (colon == std::string_view::npos || colon == 0) bad_value(key, value, "host:port");
        bind_host = std::string(value.substr(0, colon));
        port = parse_number<int>(key, value.substr(colon + 1));
    } else if (key == "embedder.kind") {
        if (value == "reference") corpus.embedder.kind = embedkit::ProviderKind::Reference;
        else if (value == "remote") corpus.embedder.kind = embedkit::ProviderKind::Remote;
        else bad_value(key, value, "reference or remote");
    } else if (key == "embedder.dimension") {
        corpus.embedder.dimension = parse_number<std::size_t>(key, value);
    } else if (key == "embedder.endpoint") {
        corpus.embedder.remote.base_url = std::string(value);
    } else if (key == "index.m") {
        corpus.index.m = parse_number<std::size_t>(key, value);
    } else if (key == "index.ef_construction") {
        corpus.index.ef_construction = parse_number<std::size_t>(key, value);
    } else if (key == "index.ef_search") {
        corpus.index.ef_search = parse_number<std::size_t>(key, value);
    } else if (key == "index.seed") {
        corpus.index.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "ingest.frames") {
        corpus.ingest.frames_per_video = parse_number<std::size_t>(key, value);
    } else if (key == "ingest.description") {
        corpus.ingest.use_description = parse_bool(key, value);
    } else if (key == "ingest.workers") {
        ingest_workers = parse_number<std::size_t>(key, value);
    } else if (key == "fusion.alpha") {
        fusion.alpha = parse_number<double>(key, value);
    } else if (key == "fusion.m_cand") {
        fusion.m_cand = parse_number<std::size_t>(key, value);
    } else if (key == "fusion.k") {
        fusion.k = parse_number<std::size_t>(key, value);
    } else if (key == "search.rerank") {
        search_rerank = parse_bool(key, value);
    } else if (key == "agent.rerank") {
        agent.rerank = parse_bool(key, value);
    } else if (key == "agent.history_turns") {
        agent.history_turns = parse_number<std::size_t>(key, value);
    } else if (key == "agent.summary_chars") {
        agent.summary_chars = parse_number<std::size_t>(key, value);
    } else if (key.starts_with("llm.")) {
        const auto rest = key.substr(4);
        const auto dot = rest.find('.');
        const auto slot = rest.substr(0, dot);
        const auto field = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
        rerank::LlmConfig* llm = slot == "routing" ? &routing_llm
                                 : slot == "search" ? &search_llm
                                 : slot == "chat"   ? &chat_llm
                                                    : nullptr;
        if (llm == nullptr) raise(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
        if (field == "kind") {
            if (value == "scripted") llm->kind = rerank::LlmKind::Scripted;
            else if (value == "remote") llm->kind = rerank::LlmKind::Remote;
            else bad_value(key, value, "scripted or remote");
        } else if (field == "model") {
            llm->model = std::string(value);
        } else if (field == "endpoint") {
            llm->endpoint.base_url = std::string(value);
        } else if (field == "script") {
            llm->script = resolve(value, base_dir);
        } else {
            raise(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
        }
    } else if (key == "translator.kind") {
        if (value == "identity") translator.kind = TranslatorKind::Identity;
        else if (value == "glossary") translator.kind = TranslatorKind::Glossary;
        else if (value == "remote") translator.kind = TranslatorKind::Remote;
        else bad_value(key, value, "identity, glossary or remote");
    } else if (key == "translator.glossary") {
        translator.glossary = resolve(value, base_dir);
    } else if (key == "translator.endpoint") {
        translator.endpoint.base_url = std::string(value);
    } else if (key == "asr.endpoint") {
        if (value.empty()) asr.reset();
        else asr = HttpEndpoint{std::string(value)};
    } else if (key == "provider.timeout_ms") {
        provider_timeout = std::chrono::milliseconds(parse_number<long>(key, value));
    } else if (key == "provider.retries") {
        provider_retries = parse_number<int>(key, value);
    } else if (key == "prompt.route") {
        check_prompt(key, value, agents::kRoutePromptVersion);
    } else if (key == "prompt.rerank") {
        check_prompt(key, value, rerank::kRerankPromptVersion);
    } else if (key == "prompt.chat") {
        check_prompt(key, value, agents::kChatPromptVersion);
    } else if (key == "prompt.summary") {
        check_prompt(key, value, agents::kSummaryPromptVersion);
    } else {
        raise(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
    }
}

void AppConfig::finalize() {
    if (provider_timeout.count() <= 0) raise(ErrorCode::Config, "provider.timeout_ms must be positive");
    if (provider_retries < 0) raise(ErrorCode::Config, "provider.retries must be >= 0");
    if (port < 0 || port > 65535) raise(ErrorCode::Config, "http.bind port out of range");
    if (ingest_workers == 0) raise(ErrorCode::Config, "ingest.workers must be >= 1");
    for (auto* endpoint : {&corpus.embedder.remote, &translator.endpoint, &routing_llm.endpoint, &search_llm.endpoint,
                           &chat_llm.endpoint}) {
        endpoint->timeout = provider_timeout;
        endpoint->retries = provider_retries;
    }
    if (asr) {
        asr->timeout = provider_timeout;
        asr->retries = provider_retries;
    }
    if (translator.kind == TranslatorKind::Glossary && translator.glossary.empty()) {
        raise(ErrorCode::Config, "translator.kind=glossary needs translator.glossary");
    }
    for (const auto* llm : {&routing_llm, &search_llm, &chat_llm}) {
        if (llm->kind == rerank::LlmKind::Remote && llm->endpoint.base_url.empty()) {
            raise(ErrorCode::Config, "a remote llm slot needs llm.<slot>.endpoint");
        }
    }
    try {
        corpus.validate();
        fusion.validate();
    } catch (const Error& e) {
        raise(ErrorCode::Config, e.what());
    }
    agent.fusion = fusion;
}

std::vector<std::pair<std::string, std::string>> process_environment() {
    std::vector<std::pair<std::string, std::string>> out;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        const std::string_view entry(*e);
        if (!entry.starts_with("VAGENT_")) continue;
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        out.emplace_back(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
    }
    return out;
}

AppConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
    AppConfig cfg;
    if (file) {
        std::ifstream in(*file);
        if (!in) raise(ErrorCode::Config, "cannot open config file " + file->string());
        const auto base = std::filesystem::absolute(*file).parent_path();
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            std::string_view text = line;
            if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
            text = trim(text);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string_view::npos) {
                raise(ErrorCode::Config, file->string() + ":" + std::to_string(n) + ": expected key = value");
            }
            const auto key = trim(text.substr(0, eq));
            auto value = trim(text.substr(eq + 1));
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
            try {
                cfg.set(key, value, base);
            } catch (const Error& e) {
                raise(ErrorCode::Config, file->string() + ":" + std::to_string(n) + ": " + e.what());
            }
        }
    }
    if (env) {
        std::map<std::string, std::string_view> by_env;
        for (const auto key : kKeys) by_env.emplace(env_name(key), key);
        for (const auto& [name, value] : env()) {
            const auto it = by_env.find(name);
            if (it == by_env.end()) raise(ErrorCode::Config, "unknown environment override " + name);
            cfg.set(it->second, value);
        }
    }
    cfg.finalize();
    return cfg;
}

}  // namespace vidsearch::gateway
