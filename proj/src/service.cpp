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

#include "hrli/service.hpp"

#include <algorithm>
#include <cstdio>

#include <httplib.h>

namespace hrli {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

json ServiceError::to_json() const
{
    json err = details_.is_object() ? details_ : json::object();
    err["code"] = code_;
    err["message"] = what();
    return json{{"protocol_version", kProtocolVersion}, {"error", err}};
}

const std::vector<ServicePreset>& service_presets()
{
    static const std::vector<ServicePreset> presets = [] {
        std::vector<ServicePreset> out;
        ServicePreset grid;
        grid.name = "gridworld";
        grid.description = "3x3 blocks, empty board, human first; robot keeps a non-adjacent majority";
        grid.domain.kind = DomainKind::Gridworld;
        grid.robot_task = "G F (adj & major)";
        out.push_back(grid);

        ServicePreset h0 = grid;
        h0.name = "gridworld-h0";
        h0.description = "3x3 blocks starting from the illustrated board with one human and two robot blocks";
        h0.domain.grid.start = parse_board(".R./.HR/...", Player::Human);
        out.push_back(h0);

        ServicePreset kitchen;
        kitchen.name = "kitchen";
        kitchen.description = "cooking desk; robot serves two- or three-onion soups";
        kitchen.domain.kind = DomainKind::Kitchen;
        kitchen.robot_task = "G F (delivered_onions_2 | delivered_onions_3)";
        kitchen.default_alpha = 0.07;
        out.push_back(kitchen);
        return out;
    }();
    return presets;
}

namespace {

const ServicePreset* find_preset(const std::string& name)
{
    for (const auto& p : service_presets())
        if (p.name == name) return &p;
    return nullptr;
}

json preset_catalog()
{
    json list = json::array();
    for (const auto& p : service_presets())
        list.push_back({{"name", p.name}, {"description", p.description}, {"robot_task", p.robot_task},
                        {"default_alpha", p.default_alpha}});
    return list;
}

ServiceError unknown_preset(const std::string& name)
{
    return ServiceError("unknown_preset", 404, "unknown preset '" + name + "'", json{{"presets", preset_catalog()}});
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const char* cell_name(Cell c)
{
    switch (c) {
    case Cell::Empty: return "empty";
    case Cell::Human: return "human";
    case Cell::Robot: return "robot";
    }
    return "empty";
}

const char* holding_name(Holding h)
{
    switch (h) {
    case Holding::Nothing: return "nothing";
    case Holding::Onion: return "onion";
    case Holding::Soup: return "soup";
    }
    return "nothing";
}

const char* tile_name(char t)
{
    switch (t) {
    case 'X': return "counter";
    case 'O': return "onions";
    case 'P': return "pot";
    case 'S': return "serve";
    default: return "floor";
    }
}

} // namespace

struct SessionManager::Prepared {
    std::string preset;
    PreparedGame game;
    double default_alpha = 0.1;
    RobotChoice robot_choice = RobotChoice::LiveGroups;
};

struct SessionManager::Entry {
    std::string id;
    std::shared_ptr<const Prepared> prepared;
    std::unique_ptr<Session> session;
    std::optional<GameEdge> last_robot;
    std::vector<GoalEvent> events;
    Clock::time_point last_used;
    std::atomic<bool> busy{false};
    /// Guards everything above except `busy`.
    std::mutex mutex;
};

namespace {

ojson render_board(const LoadedDomain& d, StateId s)
{
    ojson board;
    ojson tiles = ojson::array();
    if (d.grid) {
        const auto& b = d.grid->boards[s];
        board["kind"] = "grid";
        board["rows"] = b.rows;
        board["cols"] = b.cols;
        for (int r = 0; r < b.rows; ++r)
            for (int c = 0; c < b.cols; ++c)
                tiles.push_back(ojson{{"row", r + 1}, {"col", c + 1}, {"content", cell_name(b.at(r, c))}});
    } else if (d.kitchen) {
        const auto& k = *d.kitchen;
        const auto& st = k.states[s];
        board["kind"] = "kitchen";
        board["rows"] = k.rows();
        board["cols"] = k.cols();
        const auto human_at = k.floor[st.human_cell];
        const auto robot_at = k.floor[st.robot_cell];
        for (int r = 0; r < k.rows(); ++r)
            for (int c = 0; c < k.cols(); ++c) {
                ojson t{{"row", r + 1}, {"col", c + 1}, {"content", tile_name(k.tile(r, c))}};
                if (human_at == std::make_pair(r, c)) t["agent"] = "human";
                if (robot_at == std::make_pair(r, c)) t["agent"] = "robot";
                if (k.tile(r, c) == 'P') t["pot_onions"] = st.pot;
                tiles.push_back(std::move(t));
            }
        board["human_holding"] = holding_name(st.human);
        board["robot_holding"] = holding_name(st.robot);
        board["delivered_onions"] = st.delivered;
    } else {
        board["kind"] = "abstract";
    }
    board["tiles"] = std::move(tiles);
    board["state"] = d.domain->name(s);
    return board;
}

/// 1-based cells whose content differs between two states (grid) or the
/// human's destination cell (kitchen).
std::vector<std::pair<int, int>> touched_cells(const LoadedDomain& d, StateId from, StateId to)
{
    std::vector<std::pair<int, int>> out;
    if (d.grid) {
        const auto& a = d.grid->boards[from];
        const auto& b = d.grid->boards[to];
        for (int r = 0; r < a.rows; ++r)
            for (int c = 0; c < a.cols; ++c)
                if (a.at(r, c) != b.at(r, c)) out.emplace_back(r + 1, c + 1);
    } else if (d.kitchen) {
        const auto cell = d.kitchen->floor[d.kitchen->states[to].human_cell];
        out.emplace_back(cell.first + 1, cell.second + 1);
    }
    return out;
}

ojson edge_json(const ParityGame& g, GameEdge e)
{
    return ojson{{"action", g.edge_name(e.from, e.to)},
                 {"from", g.vertex_name(e.from)},
                 {"to", g.vertex_name(e.to)}};
}

} // namespace

SessionManager::SessionManager(ServiceOptions options) : options_(std::move(options))
{
    std::vector<std::string> names = options_.presets;
    if (names.empty())
        for (const auto& p : service_presets()) names.push_back(p.name);
    for (const auto& n : names) {
        const auto* p = find_preset(n);
        if (!p) throw unknown_preset(n);
        prepared_for(n, p->robot_task);
    }
}

SessionManager::~SessionManager() = default;

Clock::time_point SessionManager::now() const
{
    return options_.clock ? options_.clock() : Clock::now();
}

std::shared_ptr<const SessionManager::Prepared> SessionManager::prepared_for(const std::string& preset,
                                                                             const std::string& task)
{
    const auto* p = find_preset(preset);
    if (!p) throw unknown_preset(preset);
    const auto key = std::make_pair(preset, task);
    {
        std::lock_guard lock(mutex_);
        if (auto it = prepared_.find(key); it != prepared_.end()) return it->second;
    }
    auto prep = std::make_shared<Prepared>();
    prep->preset = preset;
    prep->default_alpha = p->default_alpha;
    prep->robot_choice = p->robot_choice;
    try {
        prep->game = prepare_game(p->domain, task);
    } catch (const SynthesisError& e) {
        throw ServiceError("synthesis_failed", 422, e.what());
    } catch (const CapacityError& e) {
        throw ServiceError("capacity", 503, e.what());
    } catch (const Error& e) {
        throw ServiceError("bad_request", 400, e.what());
    }
    std::lock_guard lock(mutex_);
    auto [it, inserted] = prepared_.emplace(key, std::move(prep));
    return it->second;
}

nlohmann::json SessionManager::list_presets() const
{
    json list = preset_catalog();
    std::lock_guard lock(mutex_);
    for (auto& item : list) {
        const auto name = item["name"].get<std::string>();
        item["ready"] = prepared_.count({name, find_preset(name)->robot_task}) > 0;
    }
    return json{{"protocol_version", kProtocolVersion}, {"presets", list}};
}

std::size_t SessionManager::expire_idle()
{
    const auto t = now();
    std::lock_guard lock(mutex_);
    std::size_t dropped = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        bool stale = false;
        if (!it->second->busy.load()) {
            std::lock_guard entry_lock(it->second->mutex);
            stale = t - it->second->last_used > options_.idle_timeout;
        }
        if (stale) {
            it = sessions_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    return dropped;
}

std::size_t SessionManager::session_count() const
{
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

std::shared_ptr<SessionManager::Entry> SessionManager::lookup(const std::string& id)
{
    expire_idle();
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end())
        throw ServiceError("stale_session", 404, "unknown or expired session '" + id + "'");
    return it->second;
}

namespace {

void record_goal(const ParityGame& g, VertexId v, std::size_t turn,
                 std::vector<GoalEvent>& events)
{
    if (g.color(v) != 2 || !g.domain()) return;
    GoalEvent ev;
    ev.turn = turn;
    ev.state = g.origin(v).state;
    ev.display = g.domain()->name(ev.state);
    ev.robot_recipe = true;
    events.push_back(std::move(ev));
}

ojson build_view(const std::string& id, const std::string& preset, const LoadedDomain& domain, const Session& s,
                 const std::optional<GameEdge>& last_robot, const std::vector<GoalEvent>& events)
{
    const auto& g = s.game();
    const VertexId v = s.current();
    const StateId st = g.origin(v).state;

    ojson view;
    view["protocol_version"] = kProtocolVersion;
    view["session_id"] = id;
    view["preset"] = preset;
    view["turn"] = s.history().size();
    view["to_move"] = player_name(s.to_move());
    view["status"] = status_name(s.status());
    view["board"] = render_board(domain, st);

    const auto feedback = s.status() == SessionStatus::Completed ? std::nullopt : s.feedback_state();
    std::vector<VertexId> suggested;
    if (feedback && feedback->kind == FeedbackMessage::Kind::LiveSuggestion)
        for (const auto& e : feedback->edges)
            if (e.from == v) suggested.push_back(e.to);

    ojson moves = ojson::array();
    if (s.to_move() == Player::Human && s.status() != SessionStatus::Completed) {
        std::size_t k = 0;
        for (VertexId t : g.out(v)) {
            ojson m = edge_json(g, {v, t});
            m["move_id"] = k++;
            m["suggested"] = std::find(suggested.begin(), suggested.end(), t) != suggested.end();
            m["unsafe"] = s.templates().human.is_unsafe({v, t});
            moves.push_back(std::move(m));
        }
    }
    view["legal_moves"] = std::move(moves);
    view["last_robot_move"] = last_robot ? edge_json(g, *last_robot) : ojson(nullptr);

    if (feedback) {
        ojson f;
        f["kind"] = feedback_kind_name(feedback->kind);
        f["frequency"] = feedback->frequency;
        ojson edges = ojson::array();
        ojson cells = ojson::array();
        for (std::size_t i = 0; i < feedback->edges.size(); ++i) {
            const auto& e = feedback->edges[i];
            ojson item = edge_json(g, e);
            item["at_current"] = e.from == v;
            edges.push_back(std::move(item));
            if (e.from != v) continue;
            for (auto [r, c] : touched_cells(domain, g.origin(e.from).state, g.origin(e.to).state))
                cells.push_back(ojson::array({r, c}));
        }
        f["edges"] = std::move(edges);
        f["highlight_cells"] = std::move(cells);
        view["feedback"] = std::move(f);
    } else {
        view["feedback"] = nullptr;
    }

    std::size_t human_turns = 0, messages = 0;
    for (const auto& m : s.history()) {
        if (m.mover != Player::Human) continue;
        ++human_turns;
        messages += m.feedback.has_value();
    }
    const auto& stats = s.stats();
    view["metrics"] = ojson{{"alpha", s.config().alpha},
                            {"window", s.config().window},
                            {"opportunities", stats.opportunities},
                            {"violations", stats.violations},
                            {"frequency", s.frequency()},
                            {"feedback_active", s.feedback_active()},
                            {"human_turns", human_turns},
                            {"feedback_messages", messages},
                            {"goal_events", events.size()},
                            {"resyntheses", s.resyntheses()}};

    ojson for_checksum = view;
    for_checksum.erase("session_id");
    view["checksum"] = hex(fnv1a(for_checksum.dump()));
    return view;
}

template <class T>
T field_or(const json& request, const char* key, T fallback)
{
    if (!request.contains(key) || request[key].is_null()) return fallback;
    try {
        return request[key].get<T>();
    } catch (const json::exception&) {
        throw ServiceError("bad_request", 400, std::string("field '") + key + "' has the wrong type");
    }
}

} // namespace

nlohmann::json SessionManager::create_session(const nlohmann::json& request)
{
    if (!request.is_object()) throw ServiceError("bad_request", 400, "request body must be a JSON object");
    const auto preset = field_or<std::string>(request, "preset", "");
    if (preset.empty()) throw ServiceError("bad_request", 400, "missing field 'preset'", json{{"presets", preset_catalog()}});
    const auto* p = find_preset(preset);
    if (!p) throw unknown_preset(preset);
    const auto task = field_or<std::string>(request, "robot_task", p->robot_task);

    expire_idle();
    {
        std::lock_guard lock(mutex_);
        if (sessions_.size() >= options_.max_sessions)
            throw ServiceError("capacity", 503, "session limit reached (" + std::to_string(options_.max_sessions) + ")");
    }
    auto prep = prepared_for(preset, task);

    SessionConfig cfg;
    cfg.alpha = field_or<double>(request, "alpha", prep->default_alpha);
    cfg.seed = field_or<std::uint64_t>(request, "seed", 0);
    cfg.window = field_or<std::size_t>(request, "window", 0);
    cfg.robot_choice = prep->robot_choice;
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw ServiceError("bad_request", 400, "alpha must lie in [0, 1]");

    auto entry = std::make_shared<Entry>();
    entry->prepared = prep;
    entry->session = std::make_unique<Session>(prep->game.game, prep->game.templates, cfg);
    auto& s = *entry->session;
    if (s.to_move() == Player::Robot && s.status() != SessionStatus::Completed) {
        const auto e = s.robot_step();
        entry->last_robot = e;
        record_goal(s.game(), s.current(), 0, entry->events);
    }
    entry->last_used = now();
    {
        std::lock_guard lock(mutex_);
        entry->id = "s" + std::to_string(next_id_++);
        sessions_[entry->id] = entry;
    }
    return build_view(entry->id, preset, prep->game.domain, s, entry->last_robot, entry->events);
}

nlohmann::json SessionManager::get_view(const std::string& id)
{
    auto entry = lookup(id);
    std::lock_guard lock(entry->mutex);
    entry->last_used = now();
    return build_view(entry->id, entry->prepared->preset, entry->prepared->game.domain, *entry->session,
                      entry->last_robot, entry->events);
}

nlohmann::json SessionManager::apply_move(const std::string& id, const nlohmann::json& request)
{
    auto entry = lookup(id);
    bool expected = false;
    if (!entry->busy.compare_exchange_strong(expected, true))
        throw ServiceError("busy", 409, "another move on session '" + id + "' is in progress");
    struct Release {
        std::atomic<bool>& flag;
        ~Release() { flag.store(false); }
    } release{entry->busy};

    if (options_.on_move_start) options_.on_move_start(id);
    std::lock_guard lock(entry->mutex);
    entry->last_used = now();
    auto& s = *entry->session;
    const auto& g = s.game();
    if (s.status() == SessionStatus::Completed) throw ServiceError("session_over", 409, "session is completed");
    if (s.to_move() != Player::Human) throw ServiceError("not_human_turn", 409, "it is not the human's turn");

    const auto out = g.out(s.current());
    auto legal = [&]() {
        json list = json::array();
        for (std::size_t k = 0; k < out.size(); ++k)
            list.push_back({{"move_id", k}, {"action", g.edge_name(s.current(), out[k])}});
        return list;
    };
    if (!request.is_object() || !request.contains("move_id") || !request["move_id"].is_number_integer())
        throw ServiceError("illegal_move", 422, "request needs an integer 'move_id'", json{{"legal_moves", legal()}});
    const auto move_id = request["move_id"].get<std::int64_t>();
    if (move_id < 0 || static_cast<std::size_t>(move_id) >= out.size())
        throw ServiceError("illegal_move", 422, "move " + std::to_string(move_id) + " is not legal here",
                           json{{"legal_moves", legal()}});

    const GameEdge e{s.current(), out[static_cast<std::size_t>(move_id)]};
    s.observe_human(e);
    record_goal(g, s.current(), s.history().size() - 1, entry->events);
    if (s.to_move() == Player::Robot) {
        entry->last_robot = s.robot_step();
        record_goal(g, s.current(), s.history().size() - 1, entry->events);
    }
    return build_view(entry->id, entry->prepared->preset, entry->prepared->game.domain, s, entry->last_robot,
                      entry->events);
}

std::string SessionManager::run_record(const std::string& id)
{
    auto entry = lookup(id);
    std::lock_guard lock(entry->mutex);
    entry->last_used = now();
    const auto& s = *entry->session;
    RunRecord r;
    r.seed = s.config().seed;
    r.alpha = s.config().alpha;
    r.window = s.config().window;
    r.human_model = "interactive";
    r.moves = s.history();
    r.events = entry->events;
    r.status = s.status();
    r.resyntheses = s.resyntheses();
    for (const auto& m : r.moves) {
        if (m.mover != Player::Human) continue;
        ++r.human_turns;
        r.feedback_messages += m.feedback.has_value();
    }
    return run_record_to_jsonl(r);
}

// ---------------------------------------------------------------------------
// Routing

ApiResponse dispatch(SessionManager& manager, const std::string& method, const std::string& path,
                     const std::string& body)
{
    auto ok = [](const json& j) { return ApiResponse{200, j.dump(), "application/json"}; };
    try {
        auto parse_body = [&]() {
            if (body.empty()) return json::object();
            try {
                return json::parse(body);
            } catch (const json::exception& e) {
                throw ServiceError("bad_request", 400, std::string("malformed JSON body: ") + e.what());
            }
        };
        const std::string prefix = "/api/v1/";
        if (path.rfind(prefix, 0) != 0) throw ServiceError("bad_request", 404, "unknown endpoint " + path);
        const std::string rest = path.substr(prefix.size());
        if (rest == "presets" && method == "GET") return ok(manager.list_presets());
        if (rest == "sessions" && method == "POST") return ok(manager.create_session(parse_body()));
        const std::string sessions = "sessions/";
        if (rest.rfind(sessions, 0) == 0) {
            const std::string tail = rest.substr(sessions.size());
            const auto slash = tail.find('/');
            const std::string id = tail.substr(0, slash);
            const std::string action = slash == std::string::npos ? "" : tail.substr(slash + 1);
            if (action.empty() && method == "GET") return ok(manager.get_view(id));
            if (action == "moves" && method == "POST") return ok(manager.apply_move(id, parse_body()));
            if (action == "record" && method == "GET")
                return ApiResponse{200, manager.run_record(id), "application/x-ndjson"};
        }
        throw ServiceError("bad_request", 404, "unknown endpoint " + method + " " + path);
    } catch (const ServiceError& e) {
        return ApiResponse{e.http_status(), e.to_json().dump(), "application/json"};
    } catch (const Error& e) {
        return ApiResponse{400, ServiceError("bad_request", 400, e.what()).to_json().dump(), "application/json"};
    }
}

struct HttpService::Impl {
    SessionManager& manager;
    httplib::Server server;
    explicit Impl(SessionManager& m) : manager(m) {}
};

HttpService::HttpService(SessionManager& manager) : impl_(std::make_unique<Impl>(manager))
{
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        auto r = dispatch(impl_->manager, req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    impl_->server.Get(R"(/api/v1/.*)", handler);
    impl_->server.Post(R"(/api/v1/.*)", handler);
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port)
{
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

} // namespace hrli
