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

#include "vidsearch/agents/session.hpp"

#include <chrono>
#include <fstream>
#include <random>

#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::agents {

namespace detail {

struct SessionEntry {
    std::mutex mutex;
    Session session;
    std::vector<std::string> lines;
};

}  // namespace detail

namespace {

bool valid_session_id(const std::string& id) {
    if (id.empty() || id.size() > 128) return false;
    for (unsigned char c : id) {
        if (!std::isalnum(c) && c != '-' && c != '_') return false;
    }
    return true;
}

SessionVideo video_from_json(const nlohmann::json& j) {
    SessionVideo v;
    v.video_id = j.at("video_id").get<std::string>();
    v.transcription = j.at("transcription").get<std::string>();
    v.description = j.at("description").get<std::string>();
    v.vision = j.at("vision").get<double>();
    v.audio = j.at("audio").get<double>();
    v.fused = j.at("fused").get<double>();
    v.fused_rank = j.at("rank").get<std::size_t>();
    v.rank = v.fused_rank;
    return v;
}

}  // namespace

const char* to_string(Role role) {
    switch (role) {
        case Role::User:
            return "user";
        case Role::Assistant:
            return "assistant";
        case Role::System:
            return "system";
    }
    return "unknown";
}

void apply(Session& session, const Event& event, const std::string& timestamp) {
    const auto& p = event.payload;
    if (event.type == "user_msg") {
        session.history.push_back({Role::User, p.at("text").get<std::string>(), timestamp});
    } else if (event.type == "route") {
        // Decision only; no state change.
    } else if (event.type == "search_results") {
        session.results.clear();
        session.selected.clear();
        session.rerank_degraded = false;
        for (const auto& v : p.at("videos")) session.results.push_back(video_from_json(v));
    } else if (event.type == "rerank") {
        const auto order = p.at("order").get<std::vector<std::size_t>>();
        if (order.size() != session.results.size()) {
            raise(ErrorCode::InvalidArgument, "rerank order does not cover the result list");
        }
        std::vector<SessionVideo> reordered;
        reordered.reserve(order.size());
        for (const auto src : order) {
            if (src >= session.results.size()) raise(ErrorCode::InvalidArgument, "rerank index out of range");
            reordered.push_back(session.results[src]);
            reordered.back().rank = reordered.size();
        }
        session.results = std::move(reordered);
        session.rerank_degraded = p.at("degraded").get<bool>();
        session.history.push_back(
            {Role::System, "handoff: search -> chat with " + std::to_string(session.results.size()) + " videos",
             timestamp});
    } else if (event.type == "selection") {
        auto ids = p.at("video_ids").get<std::vector<std::string>>();
        for (const auto& id : ids) {
            const bool known = std::any_of(session.results.begin(), session.results.end(),
                                           [&](const SessionVideo& v) { return v.video_id == id; });
            if (!known) raise(ErrorCode::UnknownVideoSelected, "video '" + id + "' is not in the current results");
        }
        session.selected = std::move(ids);
    } else if (event.type == "assistant_msg") {
        session.history.push_back({Role::Assistant, p.at("text").get<std::string>(), timestamp});
        if (const auto it = p.find("summaries"); it != p.end()) {
            for (auto& v : session.results) {
                if (const auto s = it->find(v.video_id); s != it->end()) v.summary = s->get<std::string>();
            }
        }
    } else {
        raise(ErrorCode::InvalidArgument, "unknown event type '" + event.type + "'");
    }
    ++session.events;
}

std::string encode_event(const Session& session, const Event& event, const std::string& timestamp) {
    nlohmann::json j = event.payload;
    j["seq"] = session.events + 1;
    j["session_id"] = session.id;
    j["ts"] = timestamp;
    j["type"] = event.type;
    return j.dump();
}

Session replay(const std::vector<std::string>& lines) {
    Session session;
    for (const auto& line : lines) {
        if (is_blank(line)) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) raise(ErrorCode::InvalidArgument, "malformed event line");
        try {
            const auto seq = j.at("seq").get<std::uint64_t>();
            const auto id = j.at("session_id").get<std::string>();
            if (session.events == 0) session.id = id;
            if (id != session.id) raise(ErrorCode::InvalidArgument, "event for a different session");
            if (seq != session.events + 1) raise(ErrorCode::InvalidArgument, "event out of sequence");
            const auto ts = j.at("ts").get<std::string>();
            Event event{j.at("type").get<std::string>(), j};
            for (const char* key : {"seq", "session_id", "ts", "type"}) event.payload.erase(key);
            apply(session, event, ts);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::InvalidArgument, std::string("malformed event: ") + e.what());
        }
    }
    return session;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof(out), "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

std::string random_session_id() {
    thread_local std::mt19937_64 rng(std::random_device{}());
    return hex64(rng()) + hex64(rng());
}

SessionStore::SessionStore(std::optional<std::filesystem::path> log_dir, Clock clock, IdGenerator ids)
    : log_dir_(std::move(log_dir)), clock_(std::move(clock)), ids_(std::move(ids)) {
    if (log_dir_) std::filesystem::create_directories(*log_dir_);
}

std::unique_ptr<SessionStore> SessionStore::open(const std::filesystem::path& log_dir, Clock clock, IdGenerator ids) {
    auto store = std::make_unique<SessionStore>(log_dir, std::move(clock), std::move(ids));
    for (const auto& file : std::filesystem::directory_iterator(log_dir)) {
        if (file.path().extension() != ".jsonl") continue;
        std::ifstream in(file.path());
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);) {
            if (!is_blank(line)) lines.push_back(line);
        }
        auto entry = std::make_shared<detail::SessionEntry>();
        entry->session = replay(lines);
        entry->session.id = file.path().stem().string();
        entry->lines = std::move(lines);
        store->sessions_.emplace(entry->session.id, std::move(entry));
    }
    return store;
}

std::string SessionStore::create() {
    std::lock_guard lock(mutex_);
    for (int attempt = 0; attempt < 16; ++attempt) {
        auto id = ids_();
        if (!valid_session_id(id)) raise(ErrorCode::InvalidArgument, "session id generator produced '" + id + "'");
        if (sessions_.contains(id)) continue;
        auto entry = std::make_shared<detail::SessionEntry>();
        entry->session.id = id;
        if (log_dir_) std::ofstream(*log_dir_ / (id + ".jsonl"), std::ios::app);
        sessions_.emplace(id, std::move(entry));
        return id;
    }
    raise(ErrorCode::InvalidArgument, "could not allocate a fresh session id");
}

bool SessionStore::contains(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return sessions_.contains(id);
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

std::shared_ptr<detail::SessionEntry> SessionStore::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) raise(ErrorCode::UnknownSession, "unknown session '" + id + "'");
    return it->second;
}

SessionStore::Turn SessionStore::begin(const std::string& id) { return Turn(this, find(id)); }

Session SessionStore::snapshot(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return entry->session;
}

std::vector<std::string> SessionStore::log(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return entry->lines;
}

SessionStore::Turn::Turn(SessionStore* store, std::shared_ptr<detail::SessionEntry> entry)
    : store_(store), entry_(std::move(entry)), lock_(entry_->mutex) {}

const Session& SessionStore::Turn::session() const { return entry_->session; }

void SessionStore::Turn::record(const Event& event) {
    const auto ts = store_->clock_();
    auto line = encode_event(entry_->session, event, ts);
    Session next = entry_->session;
    apply(next, event, ts);
    if (store_->log_dir_) {
        std::ofstream out(*store_->log_dir_ / (entry_->session.id + ".jsonl"), std::ios::app);
        out << line << '\n';
        out.flush();
        if (!out) raise(ErrorCode::Io, "cannot append to the log of session '" + entry_->session.id + "'");
    }
    entry_->lines.push_back(std::move(line));
    entry_->session = std::move(next);
}

}  // namespace vidsearch::agents
