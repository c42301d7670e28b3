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

#include "hrli/templates.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "graph_util.hpp"

namespace hrli {

namespace {

bool contains(const std::vector<GameEdge>& sorted, GameEdge e) { return std::binary_search(sorted.begin(), sorted.end(), e); }

std::string edge_text(GameEdge e) { return std::to_string(e.from) + "->" + std::to_string(e.to); }

void sort_unique(std::vector<GameEdge>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

/// Edges of a lasso split into (all edges, cycle edges).
struct LassoEdges {
    std::vector<GameEdge> all;
    std::vector<GameEdge> cycle;
};

LassoEdges lasso_edges(const ParityGame& g, const LassoRun& run)
{
    if (run.cycle.empty()) throw ConfigError("malformed lasso: empty cycle");
    auto check_vertex = [&](std::uint32_t v) {
        if (v >= g.num_vertices()) throw ConfigError("malformed lasso: unknown vertex " + std::to_string(v));
    };
    for (auto v : run.prefix) check_vertex(v);
    for (auto v : run.cycle) check_vertex(v);
    LassoEdges out;
    auto add = [&](std::uint32_t a, std::uint32_t b, bool in_cycle) {
        if (!g.find_edge(a, b))
            throw ConfigError("malformed lasso: (" + std::to_string(a) + "," + std::to_string(b) + ") is not an edge");
        out.all.push_back({a, b});
        if (in_cycle) out.cycle.push_back({a, b});
    };
    for (std::size_t i = 0; i + 1 < run.prefix.size(); ++i) add(run.prefix[i], run.prefix[i + 1], false);
    if (!run.prefix.empty()) add(run.prefix.back(), run.cycle.front(), false);
    for (std::size_t i = 0; i < run.cycle.size(); ++i) add(run.cycle[i], run.cycle[(i + 1) % run.cycle.size()], true);
    return out;
}

void require_buchi(const ParityGame& g)
{
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        if (g.color(v) != 1 && g.color(v) != 2)
            throw UnsupportedColor("vertex " + std::to_string(v) + " has color " + std::to_string(g.color(v)));
}

/// Some vertex of color 2 on a cycle inside `members`, plus a cycle through it.
/// `succ` enumerates permitted successors.
template <class Succ>
std::vector<std::uint32_t> cycle_through(std::size_t n, const Region& members, std::uint32_t f, Succ&& succ)
{
    std::vector<std::uint32_t> best;
    succ(f, [&](std::uint32_t w) {
        if (!best.empty() || !members[w]) return;
        auto p = detail::shortest_path(n, members, w, f, succ);
        if (p.empty()) return;
        p.pop_back();
        best.push_back(f);
        best.insert(best.end(), p.begin(), p.end());
    });
    return best;
}

} // namespace

bool StrategyTemplate::is_unsafe(GameEdge e) const { return contains(unsafe, e); }
bool StrategyTemplate::is_colive(GameEdge e) const { return contains(colive, e); }

std::vector<std::size_t> StrategyTemplate::groups_at(VertexId v) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < live_groups.size(); ++i)
        for (const auto& e : live_groups[i])
            if (e.from == v) {
                out.push_back(i);
                break;
            }
    return out;
}

void StrategyTemplate::normalize()
{
    sort_unique(unsafe);
    sort_unique(colive);
    for (auto& grp : live_groups) sort_unique(grp);
}

std::vector<std::string> validate_template(const ParityGame& g, const StrategyTemplate& t)
{
    std::vector<std::string> issues;
    auto check = [&](GameEdge e, const char* kind) {
        if (e.from >= g.num_vertices() || !g.find_edge(e.from, e.to)) {
            issues.push_back(std::string(kind) + " edge " + edge_text(e) + " is not an edge of the game");
            return;
        }
        if (g.owner(e.from) != t.agent)
            issues.push_back(std::string(kind) + " edge " + edge_text(e) + " does not belong to the " + player_name(t.agent));
    };
    for (auto e : t.unsafe) check(e, "unsafe");
    for (auto e : t.colive) {
        check(e, "colive");
        if (t.is_unsafe(e)) issues.push_back("edge " + edge_text(e) + " is both unsafe and colive");
    }
    for (std::size_t i = 0; i < t.live_groups.size(); ++i) {
        if (t.live_groups[i].empty()) issues.push_back("live group " + std::to_string(i) + " is empty");
        for (auto e : t.live_groups[i]) {
            check(e, "live");
            if (t.is_unsafe(e)) issues.push_back("live edge " + edge_text(e) + " is unsafe");
        }
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Synthesis

TemplatePair synthesize_templates(const ParityGame& g)
{
    require_buchi(g);
    const auto n = g.num_vertices();
    TemplatePair p;
    p.winning = cooperative_buchi(g);
    const Region& w = p.winning;
    if (!w[g.initial()]) throw NoCooperativeSolution(w);

    for (VertexId v : w.members())
        for (VertexId t : g.out(v))
            if (!w[t]) (g.owner(v) == Player::Robot ? p.robot : p.human).unsafe.push_back({v, t});

    p.rank.assign(n, TemplatePair::kNoRank);
    Region layered = g.accepting() & w;
    for (VertexId v : layered.members()) p.rank[v] = 0;
    std::uint32_t current = 0;
    auto internal_succ_in = [&](VertexId v, const Region& s, bool all) {
        bool any = false;
        for (VertexId t : g.out(v)) {
            if (!w[t]) continue;
            if (s[t]) any = true;
            else if (all) return false;
        }
        return any;
    };
    while (layered != w) {
        while (true) {
            std::vector<VertexId> round;
            for (VertexId v : (w - layered).members()) {
                bool robot = g.owner(v) == Player::Robot;
                if (internal_succ_in(v, layered, !robot)) round.push_back(v);
            }
            if (round.empty()) break;
            ++current;
            for (VertexId v : round) {
                p.rank[v] = current;
                layered.set(v);
            }
        }
        if (layered == w) break;
        std::vector<VertexId> batch;
        for (VertexId v : (w - layered).members())
            if (g.owner(v) == Player::Human && internal_succ_in(v, layered, false)) batch.push_back(v);
        if (batch.empty()) throw SynthesisError("internal: layering stalled inside the cooperative region");
        ++current;
        std::vector<GameEdge> group;
        for (VertexId v : batch)
            for (VertexId t : g.out(v))
                if (layered[t]) group.push_back({v, t});
        for (VertexId v : batch) {
            p.rank[v] = current;
            layered.set(v);
        }
        p.human.live_groups.push_back(std::move(group));
    }

    for (VertexId v : w.members()) {
        if (g.owner(v) != Player::Robot || p.rank[v] == 0) continue;
        std::vector<GameEdge> down;
        std::size_t internal = 0;
        for (VertexId t : g.out(v)) {
            if (!w[t]) continue;
            ++internal;
            if (p.rank[t] < p.rank[v]) down.push_back({v, t});
        }
        if (!down.empty() && down.size() < internal) p.robot.live_groups.push_back(std::move(down));
    }
    p.robot.normalize();
    p.human.normalize();
    return p;
}

// ---------------------------------------------------------------------------
// Compliance

ComplianceReport check_run_compliance(const ParityGame& g, const LassoRun& run, const StrategyTemplate& t)
{
    const auto edges = lasso_edges(g, run);
    ComplianceReport r;
    std::set<GameEdge> reported;
    for (auto e : edges.all)
        if (t.is_unsafe(e) && reported.insert(e).second) r.violations.push_back("unsafe edge " + edge_text(e) + " taken");
    for (auto e : edges.cycle)
        if (t.is_colive(e) && reported.insert(e).second)
            r.violations.push_back("colive edge " + edge_text(e) + " taken infinitely often");
    std::set<VertexId> cycle_vertices(run.cycle.begin(), run.cycle.end());
    std::set<GameEdge> cycle_edges(edges.cycle.begin(), edges.cycle.end());
    for (std::size_t i = 0; i < t.live_groups.size(); ++i) {
        const auto& grp = t.live_groups[i];
        bool sourced = std::any_of(grp.begin(), grp.end(), [&](GameEdge e) { return cycle_vertices.count(e.from); });
        bool taken = std::any_of(grp.begin(), grp.end(), [&](GameEdge e) { return cycle_edges.count(e); });
        if (sourced && !taken) {
            std::string names;
            for (auto e : grp) names += (names.empty() ? "" : ", ") + edge_text(e);
            r.violations.push_back("live group {" + names + "} starved");
        }
    }
    r.compliant = r.violations.empty();
    return r;
}

bool lasso_accepting(const ParityGame& g, const LassoRun& run)
{
    lasso_edges(g, run);
    return std::any_of(run.cycle.begin(), run.cycle.end(), [&](VertexId v) { return g.color(v) == 2; });
}

// ---------------------------------------------------------------------------
// Verification

VerificationReport verify_template_pair(const ParityGame& g, const TemplatePair& p, const VerifyOptions& opts)
{
    require_buchi(g);
    const auto n = g.num_vertices();
    if (n > opts.max_vertices)
        throw BoundExceeded("game has " + std::to_string(n) + " vertices, verifier bound is " +
                            std::to_string(opts.max_vertices));
    for (const auto* t : {&p.robot, &p.human}) {
        auto issues = validate_template(g, *t);
        if (!issues.empty()) throw ConfigError("invalid " + std::string(player_name(t->agent)) + " template: " + issues.front());
    }
    if (p.winning.size() != n) throw ConfigError("winning region size differs from the game");

    VerificationReport report;
    const Region all(n, true);
    const Region& start = p.winning;
    const Region coop = cooperative_buchi(g);
    auto any_edge = [&](std::uint32_t v, auto&& visit) {
        for (VertexId t : g.out(v)) visit(t);
    };

    // reachability from the start region over every edge
    Region reach = start;
    {
        std::vector<VertexId> work = start.members();
        while (!work.empty()) {
            VertexId v = work.back();
            work.pop_back();
            for (VertexId t : g.out(v))
                if (!reach[t]) {
                    reach.set(t);
                    work.push_back(t);
                }
        }
    }
    auto prefix_to = [&](VertexId target, auto&& succ, const Region& members) {
        auto path = detail::shortest_path_from_set(n, members, start, target, succ);
        if (!path.empty()) path.pop_back();
        return path;
    };
    auto accepting_lasso_from = [&](VertexId from, std::vector<std::uint32_t> prefix) {
        // from lies in the cooperative region: walk to a color-2 vertex on a cycle
        auto scc = detail::strongly_connected(n, all, any_edge);
        for (VertexId f = 0; f < n; ++f) {
            if (g.color(f) != 2 || !scc.nontrivial[static_cast<std::size_t>(scc.comp[f])]) continue;
            auto path = detail::shortest_path(n, all, from, f, any_edge);
            if (path.empty()) continue;
            path.pop_back();
            prefix.insert(prefix.end(), path.begin(), path.end());
            return LassoRun{std::move(prefix), cycle_through(n, all, f, any_edge)};
        }
        return LassoRun{std::move(prefix), {from}};
    };

    // (i) permissiveness of the human template
    for (auto e : p.human.unsafe) {
        if (!reach[e.from] || !coop[e.to]) continue;
        auto prefix = prefix_to(e.from, any_edge, all);
        prefix.push_back(e.from);
        report.counterexamples.push_back({1, "accepting run takes unsafe edge " + edge_text(e), accepting_lasso_from(e.to, prefix)});
    }
    {
        auto scc = detail::strongly_connected(n, all, any_edge);
        std::vector<int> comp_has_accepting(static_cast<std::size_t>(scc.count), -1);
        for (VertexId v = 0; v < n; ++v)
            if (g.color(v) == 2) comp_has_accepting[static_cast<std::size_t>(scc.comp[v])] = static_cast<int>(v);
        for (auto e : p.human.colive) {
            auto c = static_cast<std::size_t>(scc.comp[e.from]);
            if (!reach[e.from] || scc.comp[e.from] != scc.comp[e.to] || comp_has_accepting[c] < 0) continue;
            Region members(n);
            for (VertexId v = 0; v < n; ++v)
                if (scc.comp[v] == scc.comp[e.from]) members.set(v);
            auto f = static_cast<VertexId>(comp_has_accepting[c]);
            auto cycle = detail::path_excluding_end(n, members, f, e.from, any_edge);
            cycle.push_back(e.from);
            auto back = detail::path_excluding_end(n, members, e.to, f, any_edge);
            cycle.insert(cycle.end(), back.begin(), back.end());
            report.counterexamples.push_back(
                {1, "accepting run takes colive edge " + edge_text(e) + " infinitely often", {prefix_to(f, any_edge, all), cycle}});
        }
    }
    for (std::size_t gi = 0; gi < p.human.live_groups.size(); ++gi) {
        const auto& grp = p.human.live_groups[gi];
        auto without = [&](std::uint32_t v, auto&& visit) {
            for (VertexId t : g.out(v))
                if (!contains(grp, {v, t})) visit(t);
        };
        auto scc = detail::strongly_connected(n, all, without);
        bool found = false;
        for (auto e : grp) {
            if (found) break;
            VertexId s = e.from;
            auto c = scc.comp[s];
            if (!reach[s] || !scc.nontrivial[static_cast<std::size_t>(c)]) continue;
            for (VertexId f = 0; f < n && !found; ++f) {
                if (scc.comp[f] != c || g.color(f) != 2) continue;
                Region members(n);
                for (VertexId v = 0; v < n; ++v)
                    if (scc.comp[v] == c) members.set(v);
                std::vector<std::uint32_t> cycle;
                if (f == s) {
                    cycle = cycle_through(n, members, f, without);
                } else {
                    cycle = detail::path_excluding_end(n, members, f, s, without);
                    auto back = detail::path_excluding_end(n, members, s, f, without);
                    cycle.insert(cycle.end(), back.begin(), back.end());
                }
                report.counterexamples.push_back({1, "accepting run starves live group " + std::to_string(gi),
                                                  {prefix_to(f, any_edge, all), cycle}});
                found = true;
            }
        }
    }
    report.permissive = report.counterexamples.empty();

    // (ii) sufficiency
    auto permitted = [&](VertexId v, VertexId t) {
        const auto& tmpl = g.owner(v) == Player::Robot ? p.robot : p.human;
        return !tmpl.is_unsafe({v, t});
    };
    Region arena = start;
    {
        std::vector<VertexId> work = start.members();
        while (!work.empty()) {
            VertexId v = work.back();
            work.pop_back();
            for (VertexId t : g.out(v))
                if (permitted(v, t) && !arena[t]) {
                    arena.set(t);
                    work.push_back(t);
                }
        }
    }
    std::vector<VertexId> robot_vertices;
    std::vector<std::vector<VertexId>> choices;
    for (VertexId v : arena.members()) {
        if (g.owner(v) != Player::Robot) continue;
        std::vector<VertexId> c;
        for (VertexId t : g.out(v))
            if (permitted(v, t)) c.push_back(t);
        if (c.empty()) continue;
        robot_vertices.push_back(v);
        choices.push_back(std::move(c));
    }
    std::size_t total = 1;
    for (const auto& c : choices) {
        if (total > opts.max_strategies / c.size())
            throw BoundExceeded("more than " + std::to_string(opts.max_strategies) + " positional robot strategies");
        total *= c.size();
    }

    std::vector<std::int64_t> sigma(n, -1);
    std::vector<std::size_t> digit(robot_vertices.size(), 0);
    const std::size_t before_ii = report.counterexamples.size();
    for (std::size_t k = 0; k < total && report.counterexamples.size() - before_ii < 10; ++k) {
        for (std::size_t i = 0; i < robot_vertices.size(); ++i) sigma[robot_vertices[i]] = choices[i][digit[i]];
        for (std::size_t i = 0; i < digit.size(); ++i) {
            if (++digit[i] < choices[i].size()) break;
            digit[i] = 0;
        }
        auto sigma_succ = [&](std::uint32_t v, auto&& visit) {
            if (g.owner(v) == Player::Robot) {
                if (sigma[v] >= 0) visit(static_cast<std::uint32_t>(sigma[v]));
                return;
            }
            for (VertexId t : g.out(v))
                if (permitted(v, t)) visit(t);
        };
        // does sigma comply with the robot template on every run?
        bool complies = true;
        {
            auto scc = detail::strongly_connected(n, arena, sigma_succ);
            for (VertexId v : robot_vertices) {
                GameEdge e{v, static_cast<VertexId>(sigma[v])};
                if (p.robot.is_colive(e) && scc.comp[v] == scc.comp[e.to] &&
                    scc.nontrivial[static_cast<std::size_t>(scc.comp[v])])
                    complies = false;
            }
        }
        for (const auto& grp : p.robot.live_groups) {
            if (!complies) break;
            auto without = [&](std::uint32_t v, auto&& visit) {
                sigma_succ(v, [&](std::uint32_t t) {
                    if (!contains(grp, {v, t})) visit(t);
                });
            };
            auto scc = detail::strongly_connected(n, arena, without);
            for (auto e : grp)
                if (arena[e.from] && scc.nontrivial[static_cast<std::size_t>(scc.comp[e.from])]) complies = false;
        }
        if (!complies) continue;
        ++report.strategies_checked;

        // search for a human-compliant cycle avoiding color 2
        auto cycle_succ = [&](std::uint32_t v, auto&& visit) {
            sigma_succ(v, [&](std::uint32_t t) {
                if (g.owner(v) == Player::Human && p.human.is_colive({v, t})) return;
                visit(t);
            });
        };
        Region candidates = arena - g.accepting();
        std::vector<Region> work{candidates};
        while (!work.empty()) {
            Region part = std::move(work.back());
            work.pop_back();
            auto scc = detail::strongly_connected(n, part, cycle_succ);
            for (std::int32_t c = 0; c < scc.count; ++c) {
                if (!scc.nontrivial[static_cast<std::size_t>(c)]) continue;
                Region comp(n);
                for (VertexId v : part.members())
                    if (scc.comp[v] == c) comp.set(v);
                Region starving(n);
                std::vector<GameEdge> witnesses;
                for (const auto& grp : p.human.live_groups) {
                    bool sourced = false;
                    std::optional<GameEdge> inside;
                    for (auto e : grp) {
                        if (comp[e.from]) sourced = true;
                        if (comp[e.from] && comp[e.to] && !p.human.is_colive(e)) inside = e;
                    }
                    if (!sourced) continue;
                    if (inside) {
                        witnesses.push_back(*inside);
                    } else {
                        for (auto e : grp)
                            if (comp[e.from]) starving.set(e.from);
                    }
                }
                if (!starving.empty()) {
                    work.push_back(comp - starving);
                    continue;
                }
                // closed walk through every vertex of comp and one internal edge per sourced group
                const auto members = comp.members();
                std::vector<std::uint32_t> cycle;
                VertexId cur = members.front();
                auto walk_to = [&](VertexId target) {
                    auto seg = detail::path_excluding_end(n, comp, cur, target, cycle_succ);
                    cycle.insert(cycle.end(), seg.begin(), seg.end());
                    cur = target;
                };
                for (VertexId v : members) walk_to(v);
                for (auto e : witnesses) {
                    walk_to(e.from);
                    cycle.push_back(e.from);
                    cur = e.to;
                }
                walk_to(members.front());
                if (cycle.empty()) cycle.push_back(members.front());
                auto prefix = prefix_to(members.front(), sigma_succ, arena);
                report.counterexamples.push_back(
                    {2, "compliant run under a template-following robot strategy never visits color 2",
                     {std::move(prefix), std::move(cycle)}});
                work.clear();
                break;
            }
        }
    }
    report.sufficient = report.counterexamples.size() == before_ii;
    return report;
}

// ---------------------------------------------------------------------------
// Robot winning region against compliant humans

Region robot_win_under_template(const ParityGame& g, const StrategyTemplate& human)
{
    const auto n = g.num_vertices();
    for (const auto& issue : validate_template(g, human)) {
        if (issue.find("not an edge") != std::string::npos) throw LookupError("human template: " + issue);
        throw ConfigError("human template: " + issue);
    }
    if (human.agent != Player::Human) throw ConfigError("template does not constrain the human");
    const Region f = g.accepting();
    std::vector<std::vector<std::size_t>> groups_of(n);
    for (std::size_t i = 0; i < human.live_groups.size(); ++i)
        for (auto e : human.live_groups[i])
            if (groups_of[e.from].empty() || groups_of[e.from].back() != i) groups_of[e.from].push_back(i);

    auto cpre = [&](const Region& y, const Region& z) {
        Region out(n);
        for (VertexId v = 0; v < n; ++v) {
            if (!z[v]) continue;
            if (g.owner(v) == Player::Robot) {
                for (VertexId t : g.out(v))
                    if (y[t]) {
                        out.set(v);
                        break;
                    }
                continue;
            }
            bool stays = true, progresses = true;
            std::size_t steady = 0;
            for (VertexId t : g.out(v)) {
                GameEdge e{v, t};
                if (human.is_unsafe(e)) continue;
                if (!z[t]) stays = false;
                if (human.is_colive(e)) continue;
                ++steady;
                if (!y[t]) progresses = false;
            }
            if (!stays) continue;
            bool credited = false;
            for (auto gi : groups_of[v]) {
                const auto& grp = human.live_groups[gi];
                if (std::all_of(grp.begin(), grp.end(), [&](GameEdge e) { return y[e.to]; })) {
                    credited = true;
                    break;
                }
            }
            if ((steady > 0 && progresses) || credited) out.set(v);
        }
        return out;
    };

    Region z(n, true);
    while (true) {
        const Region base = f & cpre(z, z);
        Region x = base;
        while (true) {
            Region next = base | cpre(x, z);
            if (next == x) break;
            x = std::move(next);
        }
        if (x == z) return z;
        z = std::move(x);
    }
}

// ---------------------------------------------------------------------------
// Runtime support

std::vector<GameEdge> enabled_robot_actions(const ParityGame& g, const TemplatePair& p, VertexId v,
                                            const ColiveUsage& usage, std::uint32_t budget, RobotChoice choice)
{
    if (v >= g.num_vertices()) throw LookupError("unknown vertex " + std::to_string(v));
    if (g.owner(v) != Player::Robot) throw ConfigError("vertex " + std::to_string(v) + " is not a robot vertex");
    std::vector<GameEdge> candidates;
    auto groups = choice == RobotChoice::LiveGroups ? p.robot.groups_at(v) : std::vector<std::size_t>{};
    if (!groups.empty()) {
        for (auto gi : groups)
            for (auto e : p.robot.live_groups[gi])
                if (e.from == v) candidates.push_back(e);
        sort_unique(candidates);
    } else {
        for (VertexId t : g.out(v)) candidates.push_back({v, t});
    }
    const bool inside = p.winning.size() == g.num_vertices() && p.winning[v];
    std::vector<GameEdge> out;
    for (auto e : candidates) {
        if (p.robot.is_unsafe(e)) continue;
        if (p.robot.is_colive(e)) {
            auto it = usage.find(e);
            if (it != usage.end() && it->second >= budget) continue;
        }
        if (inside && !p.winning[e.to]) continue;
        out.push_back(e);
    }
    return out;
}

// Layout:
//
//   hrli-templates 1
//   winning <v>*
//   agent robot|human
//   unsafe <u>-><v>*
//   colive <u>-><v>*
//   live <u>-><v>+          (one line per group)
std::string export_templates(const TemplatePair& p)
{
    std::ostringstream os;
    os << "hrli-templates 1\nwinning";
    for (auto v : p.winning.members()) os << ' ' << v;
    os << '\n';
    for (const auto* t : {&p.robot, &p.human}) {
        os << "agent " << player_name(t->agent) << "\nunsafe";
        for (auto e : t->unsafe) os << ' ' << edge_text(e);
        os << "\ncolive";
        for (auto e : t->colive) os << ' ' << edge_text(e);
        os << '\n';
        for (const auto& grp : t->live_groups) {
            os << "live";
            for (auto e : grp) os << ' ' << edge_text(e);
            os << '\n';
        }
    }
    return os.str();
}

} // namespace hrli
