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

#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "hrli/service.hpp"

using namespace hrli;
using nlohmann::json;

namespace {

ServiceOptions grid_options()
{
    ServiceOptions o;
    o.presets = {"gridworld", "gridworld-h0"};
    return o;
}

std::string error_code(const std::function<void()>& call)
{
    try {
        call();
    } catch (const ServiceError& e) {
        return e.code();
    }
    return "";
}

json body_of(const ApiResponse& r) { return json::parse(r.body); }

} // namespace

TEST_SUITE("service")
{
    TEST_CASE("presets list and session creation")
    {
        SessionManager m(grid_options());
        auto presets = m.list_presets();
        CHECK(presets["protocol_version"] == kProtocolVersion);
        auto v = m.create_session({{"preset", "gridworld"}, {"seed", 3}});
        CHECK(v["protocol_version"] == kProtocolVersion);
        CHECK(v["session_id"] == "s1");
        CHECK(v["to_move"] == "human");
        CHECK(v["status"] == "active");
        CHECK(v["board"]["kind"] == "grid");
        CHECK(v["legal_moves"].size() == 9);
        CHECK(v["metrics"]["alpha"] == 0.1);
        CHECK(m.get_view("s1") == v);
        CHECK(m.session_count() == 1);
    }

    TEST_CASE("equal seeds and moves give equal views")
    {
        SessionManager m(grid_options());
        auto a = m.create_session({{"preset", "gridworld"}, {"seed", 11}});
        auto b = m.create_session({{"preset", "gridworld"}, {"seed", 11}});
        CHECK(a["checksum"] == b["checksum"]);
        for (int k = 0; k < 12; ++k) {
            const int id = k % static_cast<int>(a["legal_moves"].size());
            a = m.apply_move(a["session_id"], {{"move_id", id}});
            b = m.apply_move(b["session_id"], {{"move_id", id}});
            REQUIRE(a["checksum"] == b["checksum"]);
            CHECK(a["board"] == b["board"]);
        }
        CHECK(a["turn"] == 24);
    }

    TEST_CASE("unknown presets return the catalog")
    {
        SessionManager m(grid_options());
        try {
            m.create_session({{"preset", "chess"}});
            FAIL("expected an error");
        } catch (const ServiceError& e) {
            CHECK(e.code() == "unknown_preset");
            CHECK(e.http_status() == 404);
            CHECK(e.to_json()["error"]["presets"].size() == service_presets().size());
        }
        CHECK(error_code([&] { m.create_session({{"preset", "gridworld"}, {"alpha", 2.0}}); }) == "bad_request");
        CHECK(error_code([&] { m.create_session({{"preset", "gridworld"}, {"robot_task", "G (!major) & G F major"}}); }) ==
              "synthesis_failed");
    }

    TEST_CASE("an illegal move is rejected and leaves the session unchanged")
    {
        SessionManager m(grid_options());
        auto v = m.create_session({{"preset", "gridworld"}});
        const std::string id = v["session_id"];
        try {
            m.apply_move(id, {{"move_id", 99}});
            FAIL("expected an error");
        } catch (const ServiceError& e) {
            CHECK(e.code() == "illegal_move");
            CHECK(e.http_status() == 422);
            CHECK(e.details()["legal_moves"].size() == 9);
        }
        CHECK(error_code([&] { m.apply_move(id, {{"move", 1}}); }) == "illegal_move");
        CHECK(m.get_view(id) == v);
    }

    TEST_CASE("a move arriving while another is in progress gets busy")
    {
        SessionManager* self = nullptr;
        std::string inner;
        auto o = grid_options();
        o.on_move_start = [&](const std::string& id) {
            if (!inner.empty()) return;
            inner = "none";
            inner = error_code([&] { self->apply_move(id, {{"move_id", 0}}); });
        };
        SessionManager m(o);
        self = &m;
        auto v = m.create_session({{"preset", "gridworld"}});
        auto after = m.apply_move(v["session_id"], {{"move_id", 0}});
        CHECK(inner == "busy");
        CHECK(after["turn"] == 2);
    }

    TEST_CASE("idle sessions expire and become stale")
    {
        auto now = std::chrono::steady_clock::time_point{};
        auto o = grid_options();
        o.idle_timeout = std::chrono::minutes(5);
        o.clock = [&] { return now; };
        SessionManager m(o);
        auto v = m.create_session({{"preset", "gridworld"}});
        now += std::chrono::minutes(4);
        CHECK(m.expire_idle() == 0);
        m.get_view(v["session_id"]);
        now += std::chrono::minutes(6);
        CHECK(m.expire_idle() == 1);
        CHECK(error_code([&] { m.get_view(v["session_id"]); }) == "stale_session");
        CHECK(error_code([&] { m.apply_move("s999", {{"move_id", 0}}); }) == "stale_session");
    }

    TEST_CASE("session limit")
    {
        auto o = grid_options();
        o.max_sessions = 2;
        SessionManager m(o);
        m.create_session({{"preset", "gridworld"}});
        m.create_session({{"preset", "gridworld"}});
        CHECK(error_code([&] { m.create_session({{"preset", "gridworld"}}); }) == "capacity");
    }

    TEST_CASE("feedback highlights appear after a violation and clear after compliance")
    {
        SessionManager m(grid_options());
        auto v = m.create_session({{"preset", "gridworld-h0"}, {"alpha", 0.0}, {"window", 1}, {"seed", 5}});
        const std::string id = v["session_id"];
        bool appeared = false, cleared = false;
        for (int k = 0; k < 300 && !cleared; ++k) {
            int choice = (k * 7) % static_cast<int>(v["legal_moves"].size());
            if (!v["feedback"].is_null() && !v["feedback"]["highlight_cells"].empty()) {
                appeared = true;
                for (const auto& mv : v["legal_moves"])
                    if (mv["suggested"]) choice = mv["move_id"];
                v = m.apply_move(id, {{"move_id", choice}});
                if (v["feedback"].is_null()) cleared = true;
                continue;
            }
            v = m.apply_move(id, {{"move_id", choice}});
        }
        CHECK(appeared);
        CHECK(cleared);
        CHECK(v["metrics"]["violations"].get<int>() > 0);
    }

    TEST_CASE("dispatch routes, status codes and the run record")
    {
        SessionManager m(grid_options());
        CHECK(dispatch(m, "GET", "/api/v1/presets", "").status == 200);
        auto created = dispatch(m, "POST", "/api/v1/sessions", R"({"preset":"gridworld","seed":1})");
        REQUIRE(created.status == 200);
        const std::string id = body_of(created)["session_id"];
        auto moved = dispatch(m, "POST", "/api/v1/sessions/" + id + "/moves", R"({"move_id":2})");
        CHECK(moved.status == 200);
        CHECK(body_of(moved)["turn"] == 2);
        auto record = dispatch(m, "GET", "/api/v1/sessions/" + id + "/record", "");
        CHECK(record.content_type == "application/x-ndjson");
        CHECK(json::parse(record.body.substr(0, record.body.find('\n')))["type"] == "run");
        auto bad = dispatch(m, "POST", "/api/v1/sessions", "{not json");
        CHECK(bad.status == 400);
        CHECK(body_of(bad)["error"]["code"] == "bad_request");
        CHECK(dispatch(m, "GET", "/api/v1/nowhere", "").status == 404);
        CHECK(body_of(dispatch(m, "GET", "/api/v1/sessions/s77", ""))["error"]["code"] == "stale_session");
        CHECK(dispatch(m, "POST", "/api/v1/sessions/" + id + "/moves", R"({"move_id":-1})").status == 422);
    }

    TEST_CASE("HTTP round trip on an ephemeral port")
    {
        SessionManager m(grid_options());
        HttpService http(m);
        const int port = http.bind("127.0.0.1", 0);
        REQUIRE(port > 0);
        std::thread server([&] { http.listen_after_bind(); });
        httplib::Client client("127.0.0.1", port);
        auto presets = client.Get("/api/v1/presets");
        REQUIRE(presets);
        CHECK(presets->status == 200);
        auto created = client.Post("/api/v1/sessions", R"({"preset":"gridworld"})", "application/json");
        REQUIRE(created);
        CHECK(created->status == 200);
        const std::string id = json::parse(created->body)["session_id"];
        auto moved = client.Post("/api/v1/sessions/" + id + "/moves", R"({"move_id":99})", "application/json");
        REQUIRE(moved);
        CHECK(moved->status == 422);
        CHECK(json::parse(moved->body)["error"]["code"] == "illegal_move");
        auto view = client.Get("/api/v1/sessions/" + id);
        REQUIRE(view);
        CHECK(json::parse(view->body)["turn"] == 0);
        http.stop();
        server.join();
    }
}
