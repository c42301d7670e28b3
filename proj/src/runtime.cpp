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

#include "hrli/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "hrli/error.hpp"

namespace hrli {

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0) throw ConfigError("Rng::below requires a positive bound");
    // Rejection sampling keeps draws identical across standard libraries.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

const char* feedback_kind_name(FeedbackMessage::Kind k) noexcept
{
    switch (k) {
    case FeedbackMessage::Kind::UnsafeWarning: return "unsafe_warning";
    case FeedbackMessage::Kind::LiveSuggestion: return "live_suggestion";
    case FeedbackMessage::Kind::ColiveDiscourage: return "colive_discourage";
    case FeedbackMessage::Kind::RecoveryImpossible: return "recovery_impossible";
    }
    return "unknown";
}

const char* status_name(SessionStatus s) noexcept
{
    switch (s) {
    case SessionStatus::Active: return "active";
    case SessionStatus::TaskLost: return "task_lost";
    case SessionStatus::Completed: return "completed";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Session

Session::Session(std::shared_ptr<const ParityGame> game, TemplatePair templates, SessionConfig config)
    : game_(std::move(game)), templates_(std::move(templates)), config_(config), rng_(config.seed)
{
    if (!game_) throw ConfigError("session requires a game");
    if (config_.alpha < 0.0 || config_.alpha > 1.0) throw ConfigError("alpha must lie in [0, 1]");
    if (templates_.winning.size() != game_->num_vertices())
        throw ConfigError("templates do not belong to the session game");
    current_ = game_->initial();
    if (!templates_.winning.test(current_)) status_ = SessionStatus::TaskLost;
}

double Session::frequency() const
{
    if (config_.window == 0)
        return static_cast<double>(stats_.violations) / static_cast<double>(std::max<std::size_t>(1, stats_.opportunities));
    const auto bad = static_cast<std::size_t>(std::count(stats_.window.begin(), stats_.window.end(), true));
    return static_cast<double>(bad) / static_cast<double>(std::max<std::size_t>(1, stats_.window.size()));
}

std::vector<GameEdge> Session::robot_options() const
{
    if (game_->owner(current_) != Player::Robot) return {};
    if (status_ != SessionStatus::TaskLost)
        return enabled_robot_actions(*game_, templates_, current_, usage_, config_.colive_budget, config_.robot_choice);
    std::vector<GameEdge> all, safe;
    for (VertexId w : game_->out(current_)) {
        all.push_back({current_, w});
        if (!templates_.robot.is_unsafe({current_, w})) safe.push_back({current_, w});
    }
    return safe.empty() ? all : safe;
}

void Session::append(MoveRecord rec, VertexId to)
{
    rec.turn = history_.size();
    rec.action = game_->edge_name(rec.edge.from, rec.edge.to);
    current_ = to;
    history_.push_back(std::move(rec));
}

GameEdge Session::robot_step()
{
    if (game_->owner(current_) != Player::Robot) throw ConfigError("robot_step called on a human turn");
    auto options = robot_options();
    if (options.empty() && status_ == SessionStatus::Active) {
        handle_unsafe_transition();
        options = robot_options();
    }
    if (options.empty()) {
        // Best effort after a failed recovery: any edge keeps the run going.
        for (VertexId w : game_->out(current_)) options.push_back({current_, w});
    }
    const GameEdge e = options[static_cast<std::size_t>(rng_.below(options.size()))];
    if (templates_.robot.is_colive(e)) ++usage_[e];
    MoveRecord rec;
    rec.mover = Player::Robot;
    rec.edge = e;
    rec.enabled = options.size();
    rec.feedback_active = feedback_active_;
    append(std::move(rec), e.to);
    return e;
}

void Session::apply_robot_edge(GameEdge e)
{
    if (game_->owner(current_) != Player::Robot) throw ConfigError("apply_robot_edge called on a human turn");
    if (e.from != current_ || !game_->find_edge(e.from, e.to))
        throw LookupError("no edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " from the current vertex");
    if (templates_.robot.is_colive(e)) ++usage_[e];
    MoveRecord rec;
    rec.mover = Player::Robot;
    rec.edge = e;
    rec.enabled = robot_options().size();
    rec.feedback_active = feedback_active_;
    append(std::move(rec), e.to);
}

const MoveRecord& Session::observe_human(GameEdge e)
{
    if (game_->owner(current_) != Player::Human) throw ConfigError("observe_human called on a robot turn");
    if (e.from != current_ || !game_->find_edge(e.from, e.to))
        throw LookupError("no edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " from the current vertex");

    MoveRecord rec;
    rec.mover = Player::Human;
    rec.edge = e;
    rec.feedback = feedback_state();

    const auto& h = templates_.human;
    const auto groups = h.groups_at(current_);
    bool colive_here = false;
    for (VertexId w : game_->out(current_)) colive_here = colive_here || h.is_colive({current_, w});
    rec.opportunity = !groups.empty() || colive_here;
    if (rec.opportunity) {
        const bool colive_taken = h.is_colive(e);
        bool in_group = false;
        for (auto gi : groups) {
            const auto& grp = h.live_groups[gi];
            in_group = in_group || std::binary_search(grp.begin(), grp.end(), e);
        }
        const bool live_avoided = !groups.empty() && !in_group;
        rec.violation = colive_taken || live_avoided;
        ++stats_.opportunities;
        if (rec.violation) ++stats_.violations;
        if (colive_taken) ++stats_.colive_violations;
        if (live_avoided) ++stats_.live_violations;
        if (config_.window > 0) {
            stats_.window.push_back(rec.violation);
            if (stats_.window.size() > config_.window) stats_.window.pop_front();
        }
    }
    rec.unsafe = h.is_unsafe(e);
    if (rec.unsafe) ++stats_.unsafe_moves;

    feedback_active_ = frequency() > config_.alpha;
    rec.feedback_active = feedback_active_;
    append(std::move(rec), e.to);
    if (history_.back().unsafe && status_ == SessionStatus::Active) handle_unsafe_transition();
    return history_.back();
}

ResynthesisOutcome Session::handle_unsafe_transition()
{
    ++resyntheses_;
    const Region w = cooperative_buchi(*game_);
    if (!w.test(current_)) {
        status_ = SessionStatus::TaskLost;
        return ResynthesisOutcome::TaskLost;
    }
    templates_ = synthesize_templates(game_->with_initial(current_));
    usage_.clear();
    status_ = SessionStatus::Active;
    return ResynthesisOutcome::Continued;
}

std::vector<GameEdge> Session::suggestion_edges() const
{
    const auto& h = templates_.human;
    auto edges_from = [&](VertexId v) {
        std::vector<GameEdge> out;
        for (auto gi : h.groups_at(v))
            for (const auto& e : h.live_groups[gi])
                if (e.from == v) out.push_back(e);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };
    if (auto here = edges_from(current_); !here.empty()) return here;

    // Breadth-first search along the moves the robot may take and the human's
    // safe moves for the nearest vertex that sources a human live group.
    std::vector<char> seen(game_->num_vertices(), 0);
    std::queue<VertexId> todo;
    seen[current_] = 1;
    todo.push(current_);
    while (!todo.empty()) {
        const VertexId v = todo.front();
        todo.pop();
        if (v != current_ && game_->owner(v) == Player::Human) {
            if (auto there = edges_from(v); !there.empty()) return there;
        }
        std::vector<GameEdge> next;
        if (game_->owner(v) == Player::Robot && templates_.winning.test(v)) {
            next = enabled_robot_actions(*game_, templates_, v, {}, config_.colive_budget, RobotChoice::LiveGroups);
        } else {
            for (VertexId w : game_->out(v))
                if (!h.is_unsafe({v, w})) next.push_back({v, w});
        }
        for (const auto& e : next)
            if (!seen[e.to]) {
                seen[e.to] = 1;
                todo.push(e.to);
            }
    }
    return {};
}

std::optional<FeedbackMessage> Session::feedback_state(double alpha) const
{
    if (game_->owner(current_) != Player::Human) return std::nullopt;
    const auto& h = templates_.human;
    FeedbackMessage msg;
    msg.frequency = frequency();
    auto finish = [&](FeedbackMessage::Kind kind, std::vector<GameEdge> edges) {
        msg.kind = kind;
        msg.edges = std::move(edges);
        for (const auto& e : msg.edges) msg.edge_text.push_back(game_->edge_name(e.from, e.to));
        return std::optional<FeedbackMessage>(std::move(msg));
    };

    std::vector<GameEdge> unsafe;
    for (VertexId w : game_->out(current_))
        if (h.is_unsafe({current_, w})) unsafe.push_back({current_, w});
    if (!unsafe.empty()) return finish(FeedbackMessage::Kind::UnsafeWarning, std::move(unsafe));
    if (status_ == SessionStatus::TaskLost) return finish(FeedbackMessage::Kind::RecoveryImpossible, {});
    if (!(msg.frequency > alpha)) return std::nullopt;

    if (auto live = suggestion_edges(); !live.empty()) return finish(FeedbackMessage::Kind::LiveSuggestion, std::move(live));
    std::vector<GameEdge> colive;
    for (VertexId w : game_->out(current_))
        if (h.is_colive({current_, w})) colive.push_back({current_, w});
    if (!colive.empty()) return finish(FeedbackMessage::Kind::ColiveDiscourage, std::move(colive));
    return std::nullopt;
}

std::vector<bool> replay_feedback_activation(const std::vector<MoveRecord>& log, double alpha, std::size_t window)
{
    std::vector<bool> out;
    std::size_t opportunities = 0, violations = 0;
    std::deque<bool> recent;
    for (const auto& m : log) {
        if (m.mover != Player::Human) continue;
        if (m.opportunity) {
            ++opportunities;
            violations += m.violation ? 1 : 0;
            recent.push_back(m.violation);
            if (window > 0 && recent.size() > window) recent.pop_front();
        }
        double f;
        if (window == 0) {
            f = static_cast<double>(violations) / static_cast<double>(std::max<std::size_t>(1, opportunities));
        } else {
            const auto bad = static_cast<std::size_t>(std::count(recent.begin(), recent.end(), true));
            f = static_cast<double>(bad) / static_cast<double>(std::max<std::size_t>(1, recent.size()));
        }
        out.push_back(f > alpha);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Human models

namespace {

VertexId successor_with_state(const ParityGame& g, VertexId v, StateId s)
{
    for (VertexId w : g.out(v))
        if (g.origin(w).state == s) return w;
    throw LookupError("state " + std::to_string(s) + " is not a successor of vertex " + std::to_string(v));
}

bool is_live_here(const StrategyTemplate& t, GameEdge e)
{
    for (auto gi : t.groups_at(e.from)) {
        const auto& grp = t.live_groups[gi];
        if (std::binary_search(grp.begin(), grp.end(), e)) return true;
    }
    return false;
}

std::uint64_t origin_key(StateId s, std::uint32_t q) { return (static_cast<std::uint64_t>(s) << 32) | q; }

} // namespace

VertexId ScriptedHuman::choose(const Session& s, const std::optional<FeedbackMessage>&, Rng&)
{
    if (targets_.empty()) throw ConfigError("scripted human has an empty script");
    const VertexId to = targets_[next_ % targets_.size()];
    ++next_;
    if (!s.game().find_edge(s.current(), to))
        throw LookupError("scripted move to " + std::to_string(to) + " is not available");
    return to;
}

VertexId PolicyHuman::choose(const Session& s, const std::optional<FeedbackMessage>&, Rng&)
{
    const auto& g = s.game();
    return successor_with_state(g, s.current(), policy_(g.origin(s.current()).state));
}

VertexId ObstructingHuman::choose(const Session& s, const std::optional<FeedbackMessage>&, Rng&)
{
    const auto& g = s.game();
    const auto& h = s.templates().human;
    const VertexId v = s.current();
    std::optional<VertexId> fallback;
    for (VertexId w : g.out(v)) {
        if (h.is_unsafe({v, w})) continue;
        if (!fallback) fallback = w;
        if (!is_live_here(h, {v, w})) return w;
    }
    return fallback ? *fallback : g.out(v).front();
}

VertexId RandomHuman::choose(const Session& s, const std::optional<FeedbackMessage>&, Rng& rng)
{
    auto succ = s.game().out(s.current());
    return succ[static_cast<std::size_t>(rng.below(succ.size()))];
}

ParityGame swap_owners(const ParityGame& g)
{
    GameBuilder b;
    for (VertexId v = 0; v < g.num_vertices(); ++v) b.add_vertex(opponent(g.owner(v)), g.color(v), g.origin(v));
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        for (VertexId w : g.out(v)) b.add_edge(v, w);
    b.set_initial(g.initial());
    b.set_domain(g.domain());
    return std::move(b).build();
}

ProbabilisticHuman::ProbabilisticHuman(std::shared_ptr<const PlanningDomain> domain, const TaskFormula& task,
                                       Params params)
    : domain_(std::move(domain)), params_(params)
{
    if (!domain_) throw ConfigError("probabilistic human requires a domain");
    if (params_.compliance < 0.0 || params_.compliance > 1.0 || params_.heed < 0.0 || params_.heed > 1.0)
        throw ConfigError("human model probabilities must lie in [0, 1]");
    monitor_ = compile_monitor(task, domain_->propositions());
    own_ = std::make_shared<const ParityGame>(product(domain_, monitor_));
    own_templates_ = synthesize_templates(*own_);
    swapped_ = std::make_shared<const ParityGame>(swap_owners(*own_));
    swapped_templates_ = synthesize_templates(*swapped_);
    for (VertexId v = 0; v < own_->num_vertices(); ++v)
        index_.emplace(origin_key(own_->origin(v).state, own_->origin(v).monitor), v);
    q_ = own_->origin(own_->initial()).monitor;
}

std::string ProbabilisticHuman::describe() const
{
    std::ostringstream os;
    os << "probabilistic(compliance=" << params_.compliance << ",heed=" << params_.heed
       << ",patience=" << params_.patience << ")";
    return os.str();
}

void ProbabilisticHuman::reset()
{
    q_ = own_->origin(own_->initial()).monitor;
    best_rank_ = TemplatePair::kNoRank;
    idle_turns_ = 0;
}

void ProbabilisticHuman::observe(const Session& s, VertexId, VertexId to)
{
    q_ = monitor_.step(q_, domain_->label(s.game().origin(to).state));
    // Reaching the own goal starts a fresh round of progress tracking.
    if (auto it = index_.find(origin_key(s.game().origin(to).state, q_));
        it != index_.end() && own_templates_.rank[it->second] == 0) {
        best_rank_ = TemplatePair::kNoRank;
        idle_turns_ = 0;
    }
}

std::vector<StateId> ProbabilisticHuman::progress_targets(VertexId ov, bool stalled) const
{
    std::vector<GameEdge> edges;
    const TemplatePair* ranking = &own_templates_;
    const auto& h = own_templates_.human;
    if (!stalled)
        for (auto gi : h.groups_at(ov))
            for (const auto& e : h.live_groups[gi])
                if (e.from == ov) edges.push_back(e);
    if (edges.empty() && swapped_templates_.winning.test(ov)) {
        edges = enabled_robot_actions(*swapped_, swapped_templates_, ov, {}, kDefaultColiveBudget,
                                      RobotChoice::LiveGroups);
        ranking = &swapped_templates_;
    }
    if (params_.greedy && !edges.empty()) {
        std::uint32_t best = TemplatePair::kNoRank;
        for (const auto& e : edges) best = std::min(best, ranking->rank[e.to]);
        std::erase_if(edges, [&](const GameEdge& e) { return ranking->rank[e.to] != best; });
    }
    std::vector<StateId> out;
    for (const auto& e : edges) out.push_back(own_->origin(e.to).state);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

VertexId ProbabilisticHuman::choose(const Session& s, const std::optional<FeedbackMessage>& shown, Rng& rng)
{
    const auto& g = s.game();
    const VertexId v = s.current();
    auto pick = [&](const std::vector<VertexId>& xs) { return xs[static_cast<std::size_t>(rng.below(xs.size()))]; };

    // The shared plan counts as stalled when the human's own layer has not
    // improved for `patience` of its turns; the human then plans on its own.
    std::optional<VertexId> ov;
    bool stalled = false;
    if (auto it = index_.find(origin_key(g.origin(v).state, q_)); it != index_.end()) {
        ov = it->second;
        const std::uint32_t r = own_templates_.rank[*ov];
        if (r == 0) {
            best_rank_ = TemplatePair::kNoRank;
            idle_turns_ = 0;
        } else if (r < best_rank_) {
            best_rank_ = r;
            idle_turns_ = 0;
        } else {
            ++idle_turns_;
        }
        stalled = params_.patience > 0 && idle_turns_ >= params_.patience;
    }

    std::vector<VertexId> allowed;
    for (VertexId w : g.out(v)) allowed.push_back(w);
    if (shown && shown->kind == FeedbackMessage::Kind::UnsafeWarning) {
        std::vector<VertexId> kept;
        for (VertexId w : allowed)
            if (std::find(shown->edges.begin(), shown->edges.end(), GameEdge{v, w}) == shown->edges.end())
                kept.push_back(w);
        if (!kept.empty()) allowed = std::move(kept);
    }

    if (shown && shown->kind == FeedbackMessage::Kind::LiveSuggestion) {
        std::vector<VertexId> suggested;
        for (const auto& e : shown->edges)
            if (e.from == v) suggested.push_back(e.to);
        if (!suggested.empty() && rng.chance(params_.heed)) return pick(suggested);
    }
    if (ov && rng.chance(params_.compliance)) {
        std::vector<VertexId> progress;
        for (StateId t : progress_targets(*ov, stalled)) {
            const VertexId w = successor_with_state(g, v, t);
            if (std::find(allowed.begin(), allowed.end(), w) != allowed.end()) progress.push_back(w);
        }
        if (!progress.empty()) return pick(progress);
    }
    return pick(allowed);
}

// ---------------------------------------------------------------------------
// Simulation

RunRecord simulate(const SimulationSpec& spec, HumanModel& human)
{
    if (!spec.game) throw ConfigError("simulation requires a game");
    const bool needs_labels = spec.event || spec.robot_recipe || spec.human_recipe || spec.stop_when;
    const auto& domain = spec.game->domain();
    if (needs_labels && !domain) throw ConfigError("goal predicates require a game built from a domain");

    Session s(spec.game, spec.templates, spec.session);
    Rng human_rng(spec.session.seed ^ 0x5bd1e9955bd1e995ull);
    RunRecord r;
    r.seed = spec.session.seed;
    r.alpha = spec.session.alpha;
    r.window = spec.session.window;
    r.human_model = human.describe();

    human.reset();
    const auto started = std::chrono::steady_clock::now();
    bool completed = false;
    for (std::size_t turn = 0; turn < spec.max_moves; ++turn) {
        if (spec.time_limit_seconds > 0.0 &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() > spec.time_limit_seconds) {
            r.timed_out = true;
            break;
        }
        const VertexId from = s.current();
        if (s.to_move() == Player::Robot) {
            s.robot_step();
        } else {
            const auto shown = s.feedback_state();
            s.observe_human({from, human.choose(s, shown, human_rng)});
        }
        human.observe(s, from, s.current());
        if (!needs_labels) continue;
        const StateId st = spec.game->origin(s.current()).state;
        const auto label = domain->label(st);
        if (spec.event && eval_prop(*spec.event, label)) {
            GoalEvent ev;
            ev.turn = turn;
            ev.state = st;
            ev.display = domain->name(st);
            ev.robot_recipe = spec.robot_recipe && eval_prop(*spec.robot_recipe, label);
            ev.human_recipe = spec.human_recipe && eval_prop(*spec.human_recipe, label);
            r.events.push_back(std::move(ev));
            if (spec.stop_after_events > 0 && r.events.size() >= spec.stop_after_events) {
                completed = true;
                break;
            }
        }
        if (spec.stop_when && eval_prop(*spec.stop_when, label)) {
            r.stop_turn = turn;
            completed = true;
            break;
        }
    }
    if (completed && s.status() == SessionStatus::Active) s.mark_completed();

    r.moves = s.history();
    r.status = s.status();
    r.resyntheses = s.resyntheses();
    for (const auto& m : r.moves) {
        if (m.mover != Player::Human) continue;
        ++r.human_turns;
        if (m.feedback) ++r.feedback_messages;
    }
    return r;
}

namespace {

nlohmann::ordered_json feedback_json(const FeedbackMessage& f)
{
    nlohmann::ordered_json j;
    j["kind"] = feedback_kind_name(f.kind);
    j["frequency"] = f.frequency;
    auto edges = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < f.edges.size(); ++i)
        edges.push_back({{"from", f.edges[i].from}, {"to", f.edges[i].to}, {"text", f.edge_text[i]}});
    j["edges"] = std::move(edges);
    return j;
}

} // namespace

std::string run_record_to_jsonl(const RunRecord& r)
{
    using nlohmann::ordered_json;
    std::string out;
    auto line = [&](const ordered_json& j) {
        out += j.dump();
        out += '\n';
    };
    line(ordered_json{{"type", "run"},
                      {"format", "hrli-run"},
                      {"version", 1},
                      {"seed", r.seed},
                      {"alpha", r.alpha},
                      {"window", r.window},
                      {"human_model", r.human_model}});
    for (const auto& m : r.moves) {
        ordered_json j{{"type", "move"},
                       {"turn", m.turn},
                       {"owner", player_name(m.mover)},
                       {"from", m.edge.from},
                       {"to", m.edge.to},
                       {"action", m.action}};
        if (m.mover == Player::Human) {
            j["opportunity"] = m.opportunity;
            j["violation"] = m.violation;
            j["unsafe"] = m.unsafe;
            j["feedback"] = m.feedback ? feedback_json(*m.feedback) : ordered_json(nullptr);
        } else {
            j["enabled"] = m.enabled;
        }
        j["feedback_active"] = m.feedback_active;
        line(j);
    }
    for (const auto& e : r.events)
        line(ordered_json{{"type", "event"},
                          {"turn", e.turn},
                          {"state", e.state},
                          {"display", e.display},
                          {"robot_recipe", e.robot_recipe},
                          {"human_recipe", e.human_recipe}});
    ordered_json summary{{"type", "summary"},
                         {"status", status_name(r.status)},
                         {"moves", r.moves.size()},
                         {"human_turns", r.human_turns},
                         {"feedback_messages", r.feedback_messages},
                         {"events", r.events.size()},
                         {"resyntheses", r.resyntheses},
                         {"timed_out", r.timed_out}};
    summary["stop_turn"] = r.stop_turn ? ordered_json(*r.stop_turn) : ordered_json(nullptr);
    line(summary);
    return out;
}

} // namespace hrli
