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

#include "vidsearch/gateway/server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "vidsearch/common/error.hpp"

namespace vidsearch::gateway {
namespace {

void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

/// Parses the request body; an empty body reads as {}.
std::optional<nlohmann::json> parse_body(const httplib::Request& req, httplib::Response& res) {
    if (req.body.empty()) return nlohmann::json::object();
    auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
        send(res, error_response(ErrorCode::BadRequest, "request body is not valid JSON"));
        return std::nullopt;
    }
    return body;
}

}  // namespace

Server::Server(App& app) : app_(app), http_(std::make_unique<httplib::Server>()) {
    auto& s = *http_;
    s.Get("/health", [this](const httplib::Request&, httplib::Response& res) { send(res, app_.health()); });
    s.Post("/v1/index", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto body = parse_body(req, res)) send(res, app_.index(*body));
    });
    s.Post("/v1/search", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto body = parse_body(req, res)) send(res, app_.search(*body));
    });
    s.Post("/v1/sessions", [this](const httplib::Request&, httplib::Response& res) { send(res, app_.create_session()); });
    s.Post(R"(/v1/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto body = parse_body(req, res)) send(res, app_.post_message(req.matches[1], *body));
    });
    s.Get(R"(/v1/videos/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto flag = req.get_param_value("embeddings");
        send(res, app_.get_video(req.matches[1], flag == "1" || flag == "true"));
    });
    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto code = res.status == 404 ? ErrorCode::NotFound : ErrorCode::BadRequest;
        auto r = error_response(code, "no route for " + req.method + " " + req.path);
        r.status = res.status;
        send(res, r);
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        spdlog::error("unhandled exception: {}", message);
        send(res, error_response(ErrorCode::Io, message));
    });
}

Server::~Server() = default;

int Server::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = http_->bind_to_any_port(host);
    } else if (!http_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) raise(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void Server::listen() { http_->listen_after_bind(); }

void Server::stop() { http_->stop(); }

}  // namespace vidsearch::gateway
