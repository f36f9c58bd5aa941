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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace vidsearch::agents {

enum class Role { User, Assistant, System };
const char* to_string(Role role);

struct Message {
    Role role = Role::User;
    std::string text;
    std::string timestamp;

    friend bool operator==(const Message&, const Message&) = default;
};

/// One entry of the last ranked list V-hat, with the text the chat agent
/// grounds on.
struct SessionVideo {
    std::string video_id;
    std::string transcription;
    std::string description;
    double vision = 0.0;
    double audio = 0.0;
    double fused = 0.0;
    std::size_t fused_rank = 0;  // position before re-ranking
    std::size_t rank = 0;        // position in V-hat
    std::string summary;

    friend bool operator==(const SessionVideo&, const SessionVideo&) = default;
};

struct Session {
    std::string id;
    std::vector<Message> history;
    std::vector<SessionVideo> results;  // V-hat
    std::vector<std::string> selected;  // subset of results ids
    bool rerank_degraded = false;
    std::uint64_t events = 0;

    friend bool operator==(const Session&, const Session&) = default;
};

/// A logged state change. Serialized as one JSON line with sorted keys:
/// {"seq", "session_id", "ts", "type", ...payload}. Types: user_msg, route,
/// search_results, rerank, selection, assistant_msg.
struct Event {
    std::string type;
    nlohmann::json payload = nlohmann::json::object();
};

/// The single reducer used both live and during replay, so a replayed log
/// always reconstructs the live state.
void apply(Session& session, const Event& event, const std::string& timestamp);

std::string encode_event(const Session& session, const Event& event, const std::string& timestamp);

/// Rebuilds a session from its JSONL log. Throws InvalidArgument on a
/// malformed or out-of-order line.
Session replay(const std::vector<std::string>& lines);

namespace detail {
struct SessionEntry;
}

using Clock = std::function<std::string()>;
using IdGenerator = std::function<std::string()>;

/// UTC, ISO-8601 with milliseconds.
std::string utc_now();
std::string random_session_id();

/// Sessions with per-session exclusivity. Each session's event log is kept
/// in memory and, when a directory is configured, appended to
/// <dir>/<session id>.jsonl as events happen.
class SessionStore {
public:
    explicit SessionStore(std::optional<std::filesystem::path> log_dir = std::nullopt, Clock clock = utc_now,
                          IdGenerator ids = random_session_id);

    /// Replays every log found in the directory.
    static std::unique_ptr<SessionStore> open(const std::filesystem::path& log_dir, Clock clock = utc_now,
                                              IdGenerator ids = random_session_id);

    std::string create();
    bool contains(const std::string& id) const;
    std::size_t size() const;

    /// Handle held for the duration of one turn; owns the session's lock.
    class Turn {
    public:
        const Session& session() const;
        /// Logs, persists, then applies the event.
        void record(const Event& event);

    private:
        friend class SessionStore;
        Turn(SessionStore* store, std::shared_ptr<detail::SessionEntry> entry);
        SessionStore* store_;
        std::shared_ptr<detail::SessionEntry> entry_;
        std::unique_lock<std::mutex> lock_;
    };

    /// Throws UnknownSession.
    Turn begin(const std::string& id);

    /// Snapshot copies, taken under the session lock.
    Session snapshot(const std::string& id) const;
    std::vector<std::string> log(const std::string& id) const;

private:
    std::shared_ptr<detail::SessionEntry> find(const std::string& id) const;

    std::optional<std::filesystem::path> log_dir_;
    Clock clock_;
    IdGenerator ids_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<detail::SessionEntry>> sessions_;
};

}  // namespace vidsearch::agents
