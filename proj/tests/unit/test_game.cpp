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
#include <memory>
#include <random>
#include <set>

#include "hrli/error.hpp"
#include "hrli/game.hpp"
#include "hrli/gridworld.hpp"
#include "hrli/kitchen.hpp"
#include "oracles.hpp"
#include "test_games.hpp"

using namespace hrli;
using namespace hrli::testing;

namespace {

Region region_of(std::size_t n, std::initializer_list<VertexId> members)
{
    Region r(n);
    for (auto v : members) r.set(v);
    return r;
}

Region random_region(std::size_t n, std::mt19937_64& rng)
{
    Region r(n);
    for (std::size_t v = 0; v < n; ++v)
        if (rng() % 3 == 0) r.set(v);
    return r;
}

std::shared_ptr<const PlanningDomain> shared(PlanningDomain d) { return std::make_shared<const PlanningDomain>(std::move(d)); }

} // namespace

TEST_SUITE("game")
{
    TEST_CASE("builder rejects colors outside {1,2} and dead ends")
    {
        GameBuilder b;
        CHECK_THROWS_AS(b.add_vertex(Player::Robot, 3), UnsupportedColor);
        CHECK_THROWS_AS(b.add_vertex(Player::Robot, 0), UnsupportedColor);
        auto v = b.add_vertex(Player::Robot, 1);
        b.add_vertex(Player::Human, 1);
        CHECK_THROWS_AS(b.add_edge(v, 7), LookupError);
        b.add_edge(0, 1);
        CHECK_THROWS_AS(std::move(b).build(), ConfigError);
    }

    TEST_CASE("reverse adjacency mirrors forward adjacency")
    {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            auto g = random_game(seed);
            std::set<std::pair<VertexId, VertexId>> fwd, rev;
            for (VertexId v = 0; v < g.num_vertices(); ++v) {
                for (auto w : g.out(v)) fwd.emplace(v, w);
                for (auto u : g.in(v)) rev.emplace(u, v);
                for (EdgeId e = g.edge_begin(v); e < g.edge_end(v); ++e) {
                    CHECK(g.edge_source(e) == v);
                    CHECK(g.find_edge(v, g.edge_target(e)) == e);
                }
            }
            CHECK(fwd == rev);
            CHECK(fwd.size() == g.num_edges());
        }
    }

    TEST_CASE("attractor on the three-vertex game")
    {
        auto g = tiny_t1();
        const auto b1 = region_of(3, {2});
        CHECK(attractor(g, b1, AttractorMode::Cooperative) == region_of(3, {0, 1, 2}));
        CHECK(attractor(g, b1, AttractorMode::RobotForces) == b1);
        CHECK(attractor(g, b1, AttractorMode::HumanForces) == region_of(3, {0, 1, 2}));
        for (auto mode : {AttractorMode::Cooperative, AttractorMode::RobotForces, AttractorMode::HumanForces})
            CHECK(b1.subset_of(attractor(g, b1, mode)));
    }

    TEST_CASE("attractor matches the brute-force definition, is monotone and ordered by mode")
    {
        std::mt19937_64 rng(7);
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            auto g = random_game(seed);
            const auto n = g.num_vertices();
            auto t = random_region(n, rng);
            auto bigger = t | random_region(n, rng);
            Region per_mode[3];
            int i = 0;
            for (auto mode : {AttractorMode::RobotForces, AttractorMode::HumanForces, AttractorMode::Cooperative}) {
                auto a = attractor(g, t, mode);
                CHECK(a == oracle_attractor(g, t, mode));
                CHECK(a.subset_of(attractor(g, bigger, mode)));
                per_mode[i++] = a;
            }
            CHECK(per_mode[0].subset_of(per_mode[2]));
            CHECK(per_mode[1].subset_of(per_mode[2]));
        }
    }

    TEST_CASE("attractor inside an arena ignores edges leaving it")
    {
        auto g = tiny_t1_sink();
        // without the sink branch a0 is forced into {b0, b1} by the robot-forces rule
        auto arena = region_of(5, {0, 1, 2});
        CHECK(attractor(g, region_of(5, {1, 2}), AttractorMode::RobotForces, arena) == region_of(5, {0, 1, 2}));
        CHECK(attractor(g, region_of(5, {1, 2}), AttractorMode::RobotForces) == region_of(5, {1, 2}));
    }

    TEST_CASE("cooperative Buchi region on hand-made games")
    {
        CHECK(cooperative_buchi(tiny_t1()) == region_of(3, {0, 1, 2}));
        CHECK(cooperative_buchi(tiny_t1_sink()) == region_of(5, {0, 1, 2}));
        CHECK(cooperative_buchi(ping_pong(1)).empty());
        CHECK(cooperative_buchi(ping_pong(2)).count() == 2);
    }

    TEST_CASE("cooperative Buchi region equals the lasso-search oracle on 200 random games")
    {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            auto g = random_game(seed);
            CHECK_MESSAGE(cooperative_buchi(g) == oracle_cooperative_buchi(g), "seed " << seed);
        }
    }

    TEST_CASE("product colors follow the monitor and never exceed |domain| x |monitor|")
    {
        auto gw = build_gridworld(figure_config());
        auto d = shared(gw.domain);
        auto m = compile_monitor(parse_task("G F (adj & major)", d->propositions()), d->propositions());
        auto g = product(d, m);
        CHECK(g.num_vertices() <= d->num_states() * m.size());
        const auto adj = *d->find_proposition("adj");
        const auto major = *d->find_proposition("major");
        for (VertexId v = 0; v < g.num_vertices(); ++v) {
            auto s = g.origin(v).state;
            CHECK(g.owner(v) == d->owner(s));
            CHECK((g.color(v) == 2) == (d->holds(s, adj) && d->holds(s, major)));
        }
        for (const char* name : {"t1", "t2"}) {
            auto s = gw.find(figure_board(name));
            REQUIRE(s);
            auto v = g.find_origin({*s, 1});
            REQUIRE(v);
            CHECK(g.color(*v) == 2);
        }

        auto k = build_kitchen(KitchenConfig::desk());
        auto kd = shared(k.domain);
        auto km = compile_monitor(parse_task("G F delivered_onions_3", kd->propositions()), kd->propositions());
        auto kg = product(kd, km);
        CHECK(kg.num_vertices() <= kd->num_states() * km.size());
    }

    TEST_CASE("goal true colors every vertex 2")
    {
        auto gw = build_gridworld(2, 2, 2);
        auto d = shared(gw.domain);
        auto m = compile_monitor(parse_task("G F true", d->propositions()), d->propositions());
        auto g = product(d, m);
        for (VertexId v = 0; v < g.num_vertices(); ++v) CHECK(g.color(v) == 2);
    }

    TEST_CASE("origin map is injective and projected lassos keep trace acceptance")
    {
        auto gw = build_gridworld(2, 2, 2);
        auto d = shared(gw.domain);
        auto task = parse_task("G F (diag_main) & G F (occ_1_2) & G (!(occ_2_1 & occ_1_2 & occ_1_1))", d->propositions());
        auto m = compile_monitor(task, d->propositions());
        auto g = product(d, m);
        std::set<std::pair<StateId, std::uint32_t>> seen;
        for (VertexId v = 0; v < g.num_vertices(); ++v)
            CHECK(seen.emplace(g.origin(v).state, g.origin(v).monitor).second);

        std::mt19937_64 rng(11);
        int checked = 0;
        for (int sample = 0; sample < 300; ++sample) {
            // random walk in the product until a vertex repeats
            std::vector<VertexId> walk{g.initial()};
            std::map<VertexId, std::size_t> at{{g.initial(), 0}};
            while (true) {
                auto succ = g.out(walk.back());
                auto next = succ[rng() % succ.size()];
                if (at.count(next)) {
                    std::size_t j = at[next];
                    LassoRun run{{walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(j)},
                                 {walk.begin() + static_cast<std::ptrdiff_t>(j), walk.end()}};
                    std::vector<std::vector<PropId>> pre, cyc;
                    for (auto v : run.prefix) {
                        auto l = d->label(g.origin(v).state);
                        pre.emplace_back(l.begin(), l.end());
                    }
                    for (auto v : run.cycle) {
                        auto l = d->label(g.origin(v).state);
                        cyc.emplace_back(l.begin(), l.end());
                    }
                    // the projected domain run must be a run of the domain
                    for (std::size_t i = 0; i + 1 < walk.size(); ++i)
                        CHECK(d->find_edge(g.origin(walk[i]).state, g.origin(walk[i + 1]).state));
                    // a product cycle may need to be repeated before the monitor returns; acceptance is
                    // preserved as long as color 2 on the product cycle matches the word semantics
                    bool product_accepts = oracle_accepting(g, run);
                    CHECK(product_accepts == oracle_task_holds(task, pre, cyc));
                    CHECK(product_accepts == monitor_accepts(m, pre, cyc));
                    ++checked;
                    break;
                }
                at[next] = walk.size();
                walk.push_back(next);
            }
        }
        CHECK(checked == 300);
    }

    TEST_CASE("export is stable")
    {
        auto g = tiny_t1();
        CHECK(export_game(g) == export_game(tiny_t1()));
        CHECK(export_game(g).rfind("hrli-game 1\ninitial 0\nvertex 0 H color 1", 0) == 0);
    }
}
