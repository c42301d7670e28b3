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

#include <array>
#include <deque>
#include <map>
#include <set>
#include <string>

#include "hrli/domain.hpp"
#include "hrli/error.hpp"
#include "hrli/gridworld.hpp"
#include "hrli/kitchen.hpp"
#include "test_games.hpp"

using namespace hrli;
using namespace hrli::testing;

namespace {

PlanningDomain ping_pong_domain()
{
    DomainBuilder b;
    b.add_proposition("p");
    auto a = b.add_state(Player::Human, {0}, "a");
    auto r = b.add_state(Player::Robot, {}, "b");
    b.add_edge(a, r, "go");
    b.add_edge(r, a, "back");
    return std::move(b).build();
}

StateId state_of(const Gridworld& gw, const std::string& name)
{
    auto s = gw.find(figure_board(name));
    REQUIRE_MESSAGE(s.has_value(), "board " << name << " is not reachable");
    return *s;
}

bool has_prop(const PlanningDomain& d, StateId s, const char* name) { return d.holds(s, *d.find_proposition(name)); }

/// Independent enumeration of 3x3 boards: cells 0 empty, 1 human, 2 robot;
/// place or remove own blocks, pass only when neither is possible.
std::size_t brute_force_board_count(int cap)
{
    using Board = std::array<int, 10>; // 9 cells + mover (1 human, 2 robot)
    std::set<Board> seen;
    std::deque<Board> todo;
    Board start{};
    start[9] = 1;
    seen.insert(start);
    todo.push_back(start);
    while (!todo.empty()) {
        Board b = todo.front();
        todo.pop_front();
        const int me = b[9];
        int mine = 0;
        for (int i = 0; i < 9; ++i) mine += b[i] == me;
        std::vector<Board> next;
        for (int i = 0; i < 9; ++i) {
            if (b[i] == 0 && mine < cap) {
                Board n = b;
                n[i] = me;
                next.push_back(n);
            }
            if (b[i] == me) {
                Board n = b;
                n[i] = 0;
                next.push_back(n);
            }
        }
        if (next.empty()) next.push_back(b);
        for (auto n : next) {
            n[9] = 3 - me;
            if (seen.insert(n).second) todo.push_back(n);
        }
    }
    return seen.size();
}

} // namespace

TEST_SUITE("domain")
{
    TEST_CASE("well-formed ping-pong domain validates and has singleton successor lists")
    {
        auto d = ping_pong_domain();
        CHECK(validate_domain(d).empty());
        CHECK(successors(d, 0) == std::vector<StateId>{1});
        CHECK(successors(d, 1) == std::vector<StateId>{0});
        CHECK_THROWS_AS(successors(d, 2), LookupError);
    }

    TEST_CASE("validator reports turn alternation, dead ends and bad initial states")
    {
        DomainBuilder b;
        auto b0 = b.add_state(Player::Robot, {}, "b0");
        auto b1 = b.add_state(Player::Robot, {}, "b1");
        b.add_edge(b0, b1);
        b.set_initial(7);
        auto d = std::move(b).build();
        auto findings = validate_domain(d);
        auto mentions = [&](const std::string& needle) {
            for (const auto& f : findings)
                if (f.find(needle) != std::string::npos) return true;
            return false;
        };
        CHECK(mentions("edge (b0,b1) violates turn alternation"));
        CHECK(mentions("b1"));
        CHECK(findings.size() >= 3);
    }

    TEST_CASE("domain documents round-trip")
    {
        auto d = ping_pong_domain();
        auto text = serialize_domain(d);
        CHECK(parse_domain(text) == d);
        CHECK(serialize_domain(parse_domain(text)) == text);
        auto gw = build_gridworld(2, 2, 1);
        CHECK(parse_domain(serialize_domain(gw.domain)) == gw.domain);
        CHECK_THROWS_AS(parse_domain("hrli-domain 1\npropositions p\ninitial 0\nstates\n0 X {} a\nedges\n"), ParseError);
    }

    TEST_CASE("3x3 gridworld: state count, propositions and validity")
    {
        auto gw = build_gridworld(3, 3, 3);
        CHECK(gw.domain.num_states() == 6799);
        CHECK(gw.domain.num_states() == brute_force_board_count(3));
        CHECK(gw.domain.propositions().size() == 18);
        CHECK(validate_domain(gw.domain).empty());
        CHECK(gw.domain.owner(gw.domain.initial()) == Player::Human);
        // generators are pure functions of their configuration
        CHECK(serialize_domain(build_gridworld(3, 3, 3).domain) == serialize_domain(gw.domain));
    }

    TEST_CASE("gridworld labels agree with a recomputation from the occupancy map")
    {
        auto gw = build_gridworld(3, 3, 3);
        const auto& d = gw.domain;
        for (StateId s = 0; s < d.num_states(); ++s) {
            const auto& b = gw.boards[s];
            int occupied = 0;
            bool touching = false;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) {
                    if (b.at(r, c) == Cell::Empty) continue;
                    ++occupied;
                    if (r + 1 < 3 && b.at(r + 1, c) != Cell::Empty) touching = true;
                    if (c + 1 < 3 && b.at(r, c + 1) != Cell::Empty) touching = true;
                }
            const bool main = b.at(0, 0) != Cell::Empty && b.at(1, 1) != Cell::Empty && b.at(2, 2) != Cell::Empty;
            const bool anti = b.at(0, 2) != Cell::Empty && b.at(1, 1) != Cell::Empty && b.at(2, 0) != Cell::Empty;
            REQUIRE(has_prop(d, s, "adj") == !touching);
            REQUIRE(has_prop(d, s, "major") == (occupied >= 4));
            REQUIRE(has_prop(d, s, "diag") == (main || anti));
            REQUIRE(has_prop(d, s, "empty") == (occupied == 0));
            REQUIRE(has_prop(d, s, "human_turn") == (d.owner(s) == Player::Human));
            REQUIRE(d.out(s).size() == successors(d, s).size());
        }
    }

    TEST_CASE("illustrated boards carry the stated labels")
    {
        auto gw = build_gridworld(figure_config());
        const auto& d = gw.domain;
        for (const char* n : {"r0", "t1", "t2"}) CHECK_MESSAGE(has_prop(d, state_of(gw, n), "adj"), n);
        for (const char* n : {"h0", "r1", "h1", "r2", "r5", "h2", "r3", "h3", "r4"})
            CHECK_MESSAGE(!has_prop(d, state_of(gw, n), "adj"), n);
        for (const char* n : {"r5", "t2"}) CHECK_MESSAGE(has_prop(d, state_of(gw, n), "diag"), n);
        for (const char* n : {"h0", "r0"}) CHECK_MESSAGE(!has_prop(d, state_of(gw, n), "major"), n);
        for (const char* n : {"r1", "h1", "r2", "r5", "h2", "r3", "h3", "r4", "t1", "t2"})
            CHECK_MESSAGE(has_prop(d, state_of(gw, n), "major"), n);
    }

    TEST_CASE("illustrated single-move edges exist with their actions")
    {
        auto gw = build_gridworld(figure_config());
        const auto& d = gw.domain;
        const std::vector<std::pair<const char*, const char*>> edges{
            {"h0", "r1"}, {"h0", "r0"}, {"r1", "h1"}, {"h1", "r2"}, {"h1", "r5"}, {"r2", "h2"},
            {"h2", "r3"}, {"h2", "r1"}, {"r3", "h3"}, {"h3", "r4"}, {"h3", "t1"}, {"r4", "h2"}};
        for (auto [from, to] : edges) {
            auto e = d.find_edge(state_of(gw, from), state_of(gw, to));
            CHECK_MESSAGE(e.has_value(), from << " -> " << to);
        }
        auto h3t1 = d.find_edge(state_of(gw, "h3"), state_of(gw, "t1"));
        REQUIRE(h3t1);
        CHECK(d.edge_action(*h3t1) == "remove block at (2,2)");
        auto succ = successors(d, state_of(gw, "h2"));
        CHECK(std::count(succ.begin(), succ.end(), state_of(gw, "r3")) == 1);
        CHECK(std::count(succ.begin(), succ.end(), state_of(gw, "r1")) == 1);
    }

    TEST_CASE("1x1 empty board: major false, adj true")
    {
        auto gw = build_gridworld(1, 1, 1);
        const auto s = gw.domain.initial();
        CHECK(has_prop(gw.domain, s, "adj"));
        CHECK(!has_prop(gw.domain, s, "major"));
        CHECK(validate_domain(gw.domain).empty());
    }

    TEST_CASE("gridworld capacity and configuration errors")
    {
        GridworldConfig c;
        c.state_cap = 100;
        CHECK_THROWS_AS(build_gridworld(c), CapacityError);
        CHECK_THROWS_AS(build_gridworld(0, 3, 1), ConfigError);
        CHECK_THROWS_AS(parse_board("..x", Player::Human), ConfigError);
    }

    TEST_CASE("diagonal builder fills the anti-diagonal first")
    {
        auto gw = build_gridworld(3, 3, 3);
        StateId s = gw.domain.initial();
        s = diagonal_builder_move(gw, s);
        CHECK(gw.boards[s].at(2, 0) == Cell::Human);
    }

    TEST_CASE("kitchen desk layout: size, validity and one delivery proposition per state")
    {
        auto k = build_kitchen(KitchenConfig::desk());
        const auto& d = k.domain;
        CHECK(d.num_states() == 9024);
        CHECK(d.num_states() <= 100000);
        CHECK(validate_domain(d).empty());
        std::vector<PropId> delivered;
        for (int i = 0; i <= 3; ++i) delivered.push_back(*d.find_proposition("delivered_onions_" + std::to_string(i)));
        for (StateId s = 0; s < d.num_states(); ++s) {
            int count = 0;
            for (auto p : delivered) count += d.holds(s, p);
            REQUIRE(count == 1);
            REQUIRE(has_prop(d, s, ("pot_count_" + std::to_string(k.states[s].pot)).c_str()));
        }
    }

    TEST_CASE("kitchen transitions: onion into the pot, delivery resets the pot, onions can be returned")
    {
        auto k = build_kitchen(KitchenConfig::desk());
        const auto& d = k.domain;
        bool saw_add = false, saw_delivery = false, saw_return = false;
        for (StateId s = 0; s < d.num_states(); ++s) {
            const auto& a = k.states[s];
            for (auto i = d.edge_begin(s); i < d.edge_end(s); ++i) {
                const auto& b = k.states[d.edge_target(i)];
                const auto& action = d.edge_action(i);
                const Holding before = a.to_move == Player::Human ? a.human : a.robot;
                const Holding after = a.to_move == Player::Human ? b.human : b.robot;
                if (before == Holding::Onion && after == Holding::Nothing && b.pot == a.pot + 1) saw_add = true;
                if (b.delivered > 0) {
                    saw_delivery = true;
                    REQUIRE(before == Holding::Soup);
                    REQUIRE(b.pot == 0);
                    REQUIRE(has_prop(d, d.edge_target(i), "pot_count_0"));
                    REQUIRE(has_prop(d, d.edge_target(i), ("delivered_onions_" + std::to_string(b.delivered)).c_str()));
                }
                if (action == "return onion") {
                    saw_return = true;
                    REQUIRE(before == Holding::Onion);
                    REQUIRE(after == Holding::Nothing);
                    REQUIRE(b.pot == a.pot);
                }
            }
        }
        CHECK(saw_add);
        CHECK(saw_delivery);
        CHECK(saw_return);
    }

    TEST_CASE("kitchen layout errors")
    {
        KitchenConfig c;
        CHECK_THROWS_AS(build_kitchen(c), ConfigError);
        c.layout = {"XXXX", "XHRX", "XXXX"};
        CHECK_THROWS_AS(build_kitchen(c), ConfigError);
        c = KitchenConfig::desk();
        c.state_cap = 50;
        CHECK_THROWS_AS(build_kitchen(c), CapacityError);
    }
}
