/*
 * Copyright 2026 The hrli Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrli/error.hpp"
#include "hrli/harness.hpp"
#include "hrli/runtime.hpp"

namespace hrli {

/// Version carried by every payload as `protocol_version`.
inline constexpr int kProtocolVersion = 1;

/// Protocol-level failure with a stable error code and HTTP status.
///
/// Codes: bad_request, unknown_preset, synthesis_failed, stale_session,
/// illegal_move, not_human_turn, session_over, busy, capacity.
class ServiceError : public Error {
public:
    ServiceError(std::string code, int http_status, const std::string& message,
                 nlohmann::json details = nlohmann::json::object())
        : Error(message), code_(std::move(code)), status_(http_status), details_(std::move(details)) {}
    const std::string& code() const noexcept { return code_; }
    int http_status() const noexcept { return status_; }
    const nlohmann::json& details() const noexcept { return details_; }
    /// {"protocol_version", "error": {"code", "message", ...details}}
    nlohmann::json to_json() const;

private:
    std::string code_;
    int status_;
    nlohmann::json details_;
};

struct ServicePreset {
    std::string name;
    std::string description;
    DomainSpec domain;
    std::string robot_task;
    double default_alpha = 0.1;
    RobotChoice robot_choice = RobotChoice::LiveGroups;
};

/// gridworld (empty 3x3 board, human first), gridworld-h0 (the illustrated
/// start board) and kitchen (desk layout).
const std::vector<ServicePreset>& service_presets();

struct ServiceOptions {
    std::chrono::seconds idle_timeout{30 * 60};
    std::size_t max_sessions = 1000;
    /// Presets to synthesize at start-up; empty means all.
    std::vector<std::string> presets;
    /// Time source, replaceable in tests.
    std::function<std::chrono::steady_clock::time_point()> clock;
    /// Invoked while a move holds its session (after the busy check).
    std::function<void(const std::string& session_id)> on_move_start;
};

/// Interactive sessions keyed by id. Thread-safe; moves on one session are
/// serialized and a concurrent move is rejected with `busy`.
class SessionManager {
public:
    /// Synthesizes the selected presets. Throws ServiceError(unknown_preset or
    /// synthesis_failed).
    explicit SessionManager(ServiceOptions options = {});
    ~SessionManager();
    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    nlohmann::json list_presets() const;
    /// Request fields: preset (required), robot_task, alpha, seed, window.
    nlohmann::json create_session(const nlohmann::json& request);
    nlohmann::json get_view(const std::string& id);
    /// Request fields: move_id (index into the view's legal_moves).
    nlohmann::json apply_move(const std::string& id, const nlohmann::json& request);
    /// Line-delimited run log of the session so far.
    std::string run_record(const std::string& id);

    /// Drops sessions idle for longer than the timeout; returns how many.
    std::size_t expire_idle();
    std::size_t session_count() const;

private:
    struct Prepared;
    struct Entry;

    std::shared_ptr<const Prepared> prepared_for(const std::string& preset, const std::string& task);
    std::shared_ptr<Entry> lookup(const std::string& id);
    std::chrono::steady_clock::time_point now() const;

    ServiceOptions options_;
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, std::shared_ptr<const Prepared>> prepared_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// Transport-independent response.
struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Routes one request:
///   GET  /api/v1/presets
///   POST /api/v1/sessions
///   GET  /api/v1/sessions/<id>
///   POST /api/v1/sessions/<id>/moves
///   GET  /api/v1/sessions/<id>/record
ApiResponse dispatch(SessionManager& manager, const std::string& method, const std::string& path,
                     const std::string& body);

/// HTTP front end over dispatch().
class HttpService {
public:
    explicit HttpService(SessionManager& manager);
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    bool listen_after_bind();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace hrli
