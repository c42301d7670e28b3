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

#include <map>

#include <json.hpp>

#include "hrli/error.hpp"
#include "hrli/gridworld.hpp"
#include "hrli/harness.hpp"
#include "hrli/runtime.hpp"
#include "test_games.hpp"

using namespace hrli;
using namespace hrli::testing;

namespace {

constexpr VertexId a0 = 0, b0 = 1, b1 = 2, d = 3;

std::shared_ptr<const ParityGame> shared(ParityGame g) { return std::make_shared<const ParityGame>(std::move(g)); }

/// Human vertex h with one move to robot vertex r, which chooses between two
/// accepting human vertices that both return to r.
ParityGame fork_game()
{
    GameBuilder b;
    auto h = b.add_vertex(Player::Human, 2);
    auto r = b.add_vertex(Player::Robot, 2);
    auto x = b.add_vertex(Player::Human, 2);
    auto y = b.add_vertex(Player::Human, 2);
    b.add_edge(h, r);
    b.add_edge(r, x);
    b.add_edge(r, y);
    b.add_edge(x, r);
    b.add_edge(y, r);
    b.set_initial(r);
    return std::move(b).build();
}

/// The illustrated 3x3 game for G F (adj & major) with lookup by board name.
struct FigureGame {
    Gridworld gw;
    std::shared_ptr<const ParityGame> game;
    TemplatePair templates;

    FigureGame() : gw(build_gridworld(figure_config()))
    {
        auto domain = std::make_shared<const PlanningDomain>(gw.domain);
        const auto& ap = domain->propositions();
        game = shared(product(domain, compile_monitor(parse_task("G F (adj & major)", ap), ap)));
        templates = synthesize_templates(*game);
    }

    StateId state(const std::string& name) const { return *gw.find(figure_board(name)); }

    /// The edge from the session's current vertex into board `name`.
    GameEdge edge_to(const Session& s, const std::string& name) const
    {
        const StateId target = state(name);
        for (VertexId w : game->out(s.current()))
            if (game->origin(w).state == target) return {s.current(), w};
        FAIL("no move into board " << name);
        return {};
    }
};

const FigureGame& figure_game()
{
    static const FigureGame f;
    return f;
}

MoveRecord human_move(bool opportunity, bool violation)
{
    MoveRecord m;
    m.mover = Player::Human;
    m.opportunity = opportunity;
    m.violation = violation;
    return m;
}

} // namespace

TEST_SUITE("runtime")
{
    TEST_CASE("robot choices replay exactly for a fixed seed")
    {
        auto g = shared(fork_game());
        auto p = synthesize_templates(*g);
        auto play = [&](std::uint64_t seed) {
            SessionConfig c;
            c.seed = seed;
            Session s(g, p, c);
            std::vector<VertexId> picks;
            for (int i = 0; i < 200; ++i) {
                picks.push_back(s.robot_step().to);
                s.observe_human({s.current(), 1});
            }
            return picks;
        };
        CHECK(play(5) == play(5));
        CHECK(play(5) != play(6));
    }

    TEST_CASE("uniform robot choice between two enabled edges")
    {
        // Chi-square with one degree of freedom at the 0.1% level is 10.83;
        // the observed share must also stay within 3 points of one half.
        auto g = shared(fork_game());
        auto p = synthesize_templates(*g);
        SessionConfig c;
        c.seed = 42;
        Session s(g, p, c);
        REQUIRE(s.robot_options().size() == 2);
        const int n = 10000;
        int first = 0;
        for (int i = 0; i < n; ++i) {
            first += s.robot_step().to == 2;
            s.observe_human({s.current(), 1});
        }
        const double expected = n / 2.0;
        const double chi2 = 2 * (first - expected) * (first - expected) / expected;
        CHECK(chi2 < 10.83);
        CHECK(std::abs(first / double(n) - 0.5) <= 0.03);
    }

    TEST_CASE("three-vertex game: compliant and violating human moves")
    {
        auto g = shared(tiny_t1());
        auto p = synthesize_templates(*g);
        Session s(g, p, SessionConfig{});
        const auto& ok = s.observe_human({a0, b1});
        CHECK(ok.opportunity);
        CHECK(!ok.violation);
        s.robot_step();
        const auto& bad = s.observe_human({a0, b0});
        CHECK(bad.opportunity);
        CHECK(bad.violation);
        CHECK(s.stats().opportunities == 2);
        CHECK(s.stats().violations == 1);
        CHECK(s.frequency() == doctest::Approx(0.5));
        CHECK_THROWS_AS(s.observe_human({a0, b1}), ConfigError);
        CHECK_THROWS_AS(s.apply_robot_edge({b0, b1}), LookupError);
    }

    TEST_CASE("illustrated boards: removing the centre block complies, placing at (1,3) violates")
    {
        const auto& f = figure_game();
        Session s(f.game, f.templates, SessionConfig{});
        s.observe_human(f.edge_to(s, "r3"));
        s.apply_robot_edge(f.edge_to(s, "h3"));
        REQUIRE(f.game->origin(s.current()).state == f.state("h3"));
        Session branch = s;
        const auto& good = s.observe_human(f.edge_to(s, "t1"));
        CHECK(good.opportunity);
        CHECK(!good.violation);
        CHECK(good.action == "remove block at (2,2)");
        const auto& bad = branch.observe_human(f.edge_to(branch, "r4"));
        CHECK(bad.opportunity);
        CHECK(bad.violation);
    }

    TEST_CASE("suggestion at the illustrated board h3 names the centre block")
    {
        const auto& f = figure_game();
        SessionConfig c;
        c.alpha = 0.0;
        Session s(f.game, f.templates, c);
        s.observe_human(f.edge_to(s, "r3"));
        s.apply_robot_edge(f.edge_to(s, "h3"));
        s.observe_human(f.edge_to(s, "r4"));
        s.apply_robot_edge(f.edge_to(s, "h2"));
        s.observe_human(f.edge_to(s, "r3"));
        s.apply_robot_edge(f.edge_to(s, "h3"));
        auto msg = s.feedback_state();
        REQUIRE(msg);
        CHECK(msg->kind == FeedbackMessage::Kind::LiveSuggestion);
        CHECK(msg->edge_text == std::vector<std::string>{"remove block at (2,2)"});
        CHECK(!s.feedback_state(1.0));
    }

    TEST_CASE("activation threshold is strict and follows the counters")
    {
        std::vector<MoveRecord> log;
        for (int i = 0; i < 20; ++i) log.push_back(human_move(true, i < 3));
        auto at_010 = replay_feedback_activation(log, 0.10, 0);
        CHECK(at_010.back()); // 3/20 = 0.15
        auto at_015 = replay_feedback_activation(log, 0.15, 0);
        CHECK(!at_015.back());
        // moves without an opportunity leave the frequency unchanged
        log.push_back(human_move(false, false));
        CHECK(replay_feedback_activation(log, 0.10, 0).back());
    }

    TEST_CASE("alpha zero with a sliding window turns off once the window is clean")
    {
        std::vector<MoveRecord> log{human_move(true, true)};
        for (int i = 0; i < 4; ++i) log.push_back(human_move(true, false));
        auto act = replay_feedback_activation(log, 0.0, 4);
        CHECK(act == std::vector<bool>{true, true, true, true, false});
        auto cumulative = replay_feedback_activation(log, 0.0, 0);
        CHECK(cumulative.back());
    }

    TEST_CASE("unsafe warnings ignore alpha")
    {
        auto g = shared(tiny_t1_sink());
        auto p = synthesize_templates(*g);
        Session s(g, p, SessionConfig{});
        for (double alpha : {0.0, 0.5, 1.0}) {
            auto msg = s.feedback_state(alpha);
            REQUIRE(msg);
            CHECK(msg->kind == FeedbackMessage::Kind::UnsafeWarning);
            CHECK(msg->edges == std::vector<GameEdge>{{a0, d}});
        }
    }

    TEST_CASE("an unsafe move into a losing region ends with task lost")
    {
        auto g = shared(tiny_t1_sink());
        auto p = synthesize_templates(*g);
        Session s(g, p, SessionConfig{});
        const auto& m = s.observe_human({a0, d});
        CHECK(m.unsafe);
        CHECK(s.status() == SessionStatus::TaskLost);
        CHECK(s.resyntheses() == 1);
        s.robot_step();
        auto msg = s.feedback_state();
        REQUIRE(msg);
        CHECK(msg->kind == FeedbackMessage::Kind::RecoveryImpossible);
    }

    TEST_CASE("an unsafe move into a winnable vertex re-synthesizes and continues")
    {
        auto g = shared(tiny_t1());
        auto p = synthesize_templates(*g);
        // Stale templates that forbid a0 -> b0 although b0 is winning.
        auto stale = p;
        stale.human.unsafe.push_back({a0, b0});
        stale.human.live_groups.clear();
        stale.human.normalize();
        Session s(g, stale, SessionConfig{});
        const auto& m = s.observe_human({a0, b0});
        CHECK(m.unsafe);
        CHECK(s.status() == SessionStatus::Active);
        CHECK(s.resyntheses() == 1);
        const auto fresh = synthesize_templates(g->with_initial(b0));
        CHECK(s.templates().human == fresh.human);
        CHECK(s.templates().robot == fresh.robot);
        CHECK(!s.templates().human.is_unsafe({a0, b0}));
        CHECK(s.handle_unsafe_transition() == ResynthesisOutcome::Continued);
    }

    TEST_CASE("zero move budget yields an empty log")
    {
        auto g = shared(tiny_t1());
        SimulationSpec spec{g, synthesize_templates(*g), SessionConfig{}};
        spec.max_moves = 0;
        RandomHuman h;
        auto r = simulate(spec, h);
        CHECK(r.moves.empty());
        CHECK(r.events.empty());
        CHECK(r.status == SessionStatus::Active);
    }

    TEST_CASE("replayed activation equals the live decisions and logs are byte-identical per seed")
    {
        auto prepared = prepare_game(parse_domain_spec("gridworld"), "G F (adj & major)");
        for (std::size_t window : {std::size_t{0}, std::size_t{5}}) {
            SimulationSpec spec{prepared.game, prepared.templates, SessionConfig{}};
            spec.session.alpha = 0.2;
            spec.session.window = window;
            spec.session.seed = 99;
            spec.max_moves = 300;
            spec.session.robot_choice = RobotChoice::LiveGroups;
            RandomHuman h;
            auto r = simulate(spec, h);
            std::vector<bool> live;
            for (const auto& m : r.moves)
                if (m.mover == Player::Human) live.push_back(m.feedback_active);
            CHECK(replay_feedback_activation(r.moves, 0.2, window) == live);
            RandomHuman again;
            CHECK(run_record_to_jsonl(simulate(spec, again)) == run_record_to_jsonl(r));
        }
    }

    TEST_CASE("run log lines are JSON with header, moves and summary")
    {
        auto g = shared(tiny_t1());
        SimulationSpec spec{g, synthesize_templates(*g), SessionConfig{}};
        spec.max_moves = 6;
        RandomHuman h;
        auto r = simulate(spec, h);
        auto text = run_record_to_jsonl(r);
        std::vector<nlohmann::json> lines;
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            lines.push_back(nlohmann::json::parse(text.substr(start, end - start)));
            start = end + 1;
        }
        REQUIRE(lines.size() == 8);
        CHECK(lines.front()["type"] == "run");
        CHECK(lines.back()["type"] == "summary");
        for (std::size_t i = 1; i + 1 < lines.size(); ++i) CHECK(lines[i]["type"] == "move");
    }
}
