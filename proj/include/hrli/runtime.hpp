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

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hrli/game.hpp"
#include "hrli/logic.hpp"
#include "hrli/templates.hpp"

namespace hrli {

/// Seeded generator with platform-independent bounded draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}
    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Uniform double in [0, 1) built from 53 random bits.
    double unit();
    bool chance(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

struct FeedbackMessage {
    enum class Kind { UnsafeWarning, LiveSuggestion, ColiveDiscourage, RecoveryImpossible };

    Kind kind = Kind::LiveSuggestion;
    std::vector<GameEdge> edges;
    std::vector<std::string> edge_text;
    /// Violation frequency when the message was produced.
    double frequency = 0.0;

    friend bool operator==(const FeedbackMessage&, const FeedbackMessage&) = default;
};

const char* feedback_kind_name(FeedbackMessage::Kind k) noexcept;

enum class SessionStatus { Active, TaskLost, Completed };
const char* status_name(SessionStatus s) noexcept;

struct HumanStats {
    std::size_t opportunities = 0;
    std::size_t violations = 0;
    std::size_t live_violations = 0;
    std::size_t colive_violations = 0;
    std::size_t unsafe_moves = 0;
    /// Outcomes (true = violation) of the most recent opportunities, bounded by the window size.
    std::deque<bool> window;

    friend bool operator==(const HumanStats&, const HumanStats&) = default;
};

struct SessionConfig {
    double alpha = 0.05;
    /// 0 keeps cumulative counts; N > 0 uses the last N opportunities.
    std::size_t window = 0;
    std::uint32_t colive_budget = kDefaultColiveBudget;
    RobotChoice robot_choice = RobotChoice::AllEdges;
    std::uint64_t seed = 0;
};

/// One move of a session log.
struct MoveRecord {
    std::size_t turn = 0;
    Player mover = Player::Robot;
    GameEdge edge;
    std::string action;
    /// Human moves: whether the move was a constraint opportunity / violation / unsafe.
    bool opportunity = false;
    bool violation = false;
    bool unsafe = false;
    /// Activation flag after the move (recomputed after human moves only).
    bool feedback_active = false;
    /// Message shown to the human before a human move.
    std::optional<FeedbackMessage> feedback;
    /// Robot moves: size of the enabled set the move was drawn from.
    std::size_t enabled = 0;
};

enum class ResynthesisOutcome { Continued, TaskLost };

/// Online loop state: current vertex, templates, counters and feedback flag.
///
/// Single-threaded; distinct sessions are independent.
class Session {
public:
    Session(std::shared_ptr<const ParityGame> game, TemplatePair templates, SessionConfig config);

    const ParityGame& game() const noexcept { return *game_; }
    const std::shared_ptr<const ParityGame>& game_ptr() const noexcept { return game_; }
    const TemplatePair& templates() const noexcept { return templates_; }
    const SessionConfig& config() const noexcept { return config_; }
    VertexId current() const noexcept { return current_; }
    Player to_move() const { return game_->owner(current_); }
    SessionStatus status() const noexcept { return status_; }
    const HumanStats& stats() const noexcept { return stats_; }
    const std::vector<MoveRecord>& history() const noexcept { return history_; }
    const ColiveUsage& colive_usage() const noexcept { return usage_; }
    bool feedback_active() const noexcept { return feedback_active_; }
    std::size_t resyntheses() const noexcept { return resyntheses_; }

    /// violations / max(1, opportunities) over the configured scope.
    double frequency() const;

    /// Robot edges the session would draw from at the current vertex.
    std::vector<GameEdge> robot_options() const;

    /// Draws a robot edge uniformly from the enabled set and applies it.
    /// Re-synthesizes when the set is empty. Requires the robot to move.
    GameEdge robot_step();
    /// Applies a given robot edge (replays, forced moves). Throws LookupError
    /// when it is not an edge from the current vertex.
    void apply_robot_edge(GameEdge e);

    /// Classifies and applies a human edge. Throws LookupError for edges that
    /// do not leave the current vertex and ConfigError when it is not the human's turn.
    const MoveRecord& observe_human(GameEdge e);

    /// Message for the human at the current vertex. Unsafe warnings do not
    /// depend on `alpha`; suggestions require frequency() > alpha. Robot turns
    /// get no message.
    std::optional<FeedbackMessage> feedback_state(double alpha) const;
    std::optional<FeedbackMessage> feedback_state() const { return feedback_state(config_.alpha); }

    /// Re-solves the game and installs fresh templates if the current vertex can
    /// still satisfy the objective; otherwise marks the task lost.
    ResynthesisOutcome handle_unsafe_transition();

    void mark_completed() { status_ = SessionStatus::Completed; }

private:
    void append(MoveRecord rec, VertexId to);
    std::vector<GameEdge> suggestion_edges() const;

    std::shared_ptr<const ParityGame> game_;
    TemplatePair templates_;
    SessionConfig config_;
    Rng rng_;
    VertexId current_;
    SessionStatus status_ = SessionStatus::Active;
    HumanStats stats_;
    ColiveUsage usage_;
    bool feedback_active_ = false;
    std::size_t resyntheses_ = 0;
    std::vector<MoveRecord> history_;
};

/// Recomputes the activation flag after each human move from the log alone.
std::vector<bool> replay_feedback_activation(const std::vector<MoveRecord>& log, double alpha, std::size_t window);

// ---------------------------------------------------------------------------
// Simulated humans

class HumanModel {
public:
    virtual ~HumanModel() = default;
    /// Picks a successor of the session's current (human) vertex.
    virtual VertexId choose(const Session& s, const std::optional<FeedbackMessage>& shown, Rng& rng) = 0;
    /// Called after every applied move, robot or human.
    virtual void observe(const Session&, VertexId /*from*/, VertexId /*to*/) {}
    /// Restores the model's initial internal state; simulate() calls it first.
    virtual void reset() {}
    virtual std::string describe() const = 0;
};

/// Replays a fixed list of target vertices, cycling when exhausted.
class ScriptedHuman : public HumanModel {
public:
    explicit ScriptedHuman(std::vector<VertexId> targets) : targets_(std::move(targets)) {}
    VertexId choose(const Session& s, const std::optional<FeedbackMessage>&, Rng&) override;
    std::string describe() const override { return "scripted"; }
    void reset() override { next_ = 0; }

private:
    std::vector<VertexId> targets_;
    std::size_t next_ = 0;
};

/// Deterministic policy over domain states; the chosen state must be a successor.
class PolicyHuman : public HumanModel {
public:
    PolicyHuman(std::string name, std::function<StateId(StateId)> policy)
        : name_(std::move(name)), policy_(std::move(policy)) {}
    VertexId choose(const Session& s, const std::optional<FeedbackMessage>&, Rng&) override;
    std::string describe() const override { return name_; }

private:
    std::string name_;
    std::function<StateId(StateId)> policy_;
};

/// Takes the lowest-numbered edge that is neither unsafe nor live at the
/// current vertex, falling back to the lowest safe edge.
class ObstructingHuman : public HumanModel {
public:
    VertexId choose(const Session& s, const std::optional<FeedbackMessage>&, Rng&) override;
    std::string describe() const override { return "obstructor"; }
};

/// Uniform over all successors.
class RandomHuman : public HumanModel {
public:
    VertexId choose(const Session& s, const std::optional<FeedbackMessage>&, Rng& rng) override;
    std::string describe() const override { return "random"; }
};

/// Human pursuing its own task.
///
/// With probability `heed` it follows a live suggestion shown to it. Otherwise,
/// with probability `compliance`, it makes progress on its own task: at a
/// source of a live group of its own human template it takes an edge of that
/// group, elsewhere (or after `patience` turns without progress) an edge the
/// template construction would enable for it as the controlling player. Remaining moves are uniform. Edges named by an unsafe
/// warning are avoided whenever an alternative exists.
class ProbabilisticHuman : public HumanModel {
public:
    struct Params {
        double compliance = 1.0;
        double heed = 0.2;
        /// Human turns without progress on the own task before the human
        /// stops relying on the robot (0 disables it).
        std::size_t patience = 8;
        /// Restrict progress moves to those reaching the lowest own layer.
        bool greedy = true;
    };

    /// `task` is evaluated over the propositions of the session game's domain.
    ProbabilisticHuman(std::shared_ptr<const PlanningDomain> domain, const TaskFormula& task, Params params);

    VertexId choose(const Session& s, const std::optional<FeedbackMessage>& shown, Rng& rng) override;
    void observe(const Session& s, VertexId from, VertexId to) override;
    void reset() override;
    std::string describe() const override;

    const ParityGame& own_game() const noexcept { return *own_; }

private:
    std::vector<StateId> progress_targets(VertexId own_vertex, bool stalled) const;

    std::shared_ptr<const PlanningDomain> domain_;
    ParityMonitor monitor_;
    std::shared_ptr<const ParityGame> own_;
    TemplatePair own_templates_;
    std::shared_ptr<const ParityGame> swapped_;
    TemplatePair swapped_templates_;
    std::unordered_map<std::uint64_t, VertexId> index_;
    Params params_;
    std::uint32_t q_ = 0;
    std::uint32_t best_rank_ = TemplatePair::kNoRank;
    std::size_t idle_turns_ = 0;
};

/// Copy of `g` with every owner flipped.
ParityGame swap_owners(const ParityGame& g);

// ---------------------------------------------------------------------------
// Simulation

struct GoalEvent {
    std::size_t turn = 0;
    StateId state = 0;
    std::string display;
    bool robot_recipe = false;
    bool human_recipe = false;
};

struct RunRecord {
    std::uint64_t seed = 0;
    double alpha = 0.0;
    std::size_t window = 0;
    std::string human_model;
    std::vector<MoveRecord> moves;
    std::vector<GoalEvent> events;
    SessionStatus status = SessionStatus::Active;
    std::size_t human_turns = 0;
    std::size_t feedback_messages = 0;
    std::size_t resyntheses = 0;
    /// Turn at which `stop_when` first held, if it did.
    std::optional<std::size_t> stop_turn;
    bool timed_out = false;
};

struct SimulationSpec {
    std::shared_ptr<const ParityGame> game;
    TemplatePair templates;
    SessionConfig session;
    std::size_t max_moves = 500;
    /// Stop after this many goal events (0: never).
    std::size_t stop_after_events = 0;
    /// Entering a state whose label satisfies `event` counts as a goal event.
    std::optional<PropFormula> event;
    std::optional<PropFormula> robot_recipe;
    std::optional<PropFormula> human_recipe;
    /// Stop as soon as an entered state satisfies this formula.
    std::optional<PropFormula> stop_when;
    /// Wall-clock limit for the run in seconds (0: none).
    double time_limit_seconds = 0.0;
};

/// Runs the robot/human loop. Deterministic for a given SimulationSpec and human model state.
RunRecord simulate(const SimulationSpec& spec, HumanModel& human);

/// One JSON document per line: a header line, one line per move, one per goal
/// event and a summary line (schema in docs/formats.md).
std::string run_record_to_jsonl(const RunRecord& r);

} // namespace hrli
