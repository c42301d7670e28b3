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

#include "oracles.hpp"

#include <algorithm>
#include <set>

namespace hrli::testing {

namespace {

std::vector<std::vector<bool>> reachability(const ParityGame& g)
{
    const auto n = g.num_vertices();
    // reach[u][v]: v reachable from u in one or more steps
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v : g.out(u)) reach[u][v] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    return reach;
}

std::vector<std::pair<VertexId, VertexId>> unrolled_edges(const LassoRun& run, std::size_t laps)
{
    std::vector<VertexId> word = run.prefix;
    for (std::size_t k = 0; k < laps; ++k) word.insert(word.end(), run.cycle.begin(), run.cycle.end());
    word.push_back(run.cycle.front());
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) edges.emplace_back(word[i], word[i + 1]);
    return edges;
}

} // namespace

Region oracle_cooperative_buchi(const ParityGame& g)
{
    const auto n = g.num_vertices();
    auto reach = reachability(g);
    Region out(n);
    for (VertexId v = 0; v < n; ++v)
        for (VertexId f = 0; f < n; ++f)
            if (g.color(f) == 2 && reach[f][f] && (v == f || reach[v][f])) {
                out.set(v);
                break;
            }
    return out;
}

Region oracle_attractor(const ParityGame& g, const Region& target, AttractorMode mode)
{
    Region set = target;
    bool changed = true;
    while (changed) {
        changed = false;
        for (VertexId v = 0; v < g.num_vertices(); ++v) {
            if (set[v]) continue;
            bool some = false, all = true;
            for (VertexId w : g.out(v)) {
                some = some || set[w];
                all = all && set[w];
            }
            bool mine = mode == AttractorMode::Cooperative ||
                        (mode == AttractorMode::RobotForces && g.owner(v) == Player::Robot) ||
                        (mode == AttractorMode::HumanForces && g.owner(v) == Player::Human);
            if ((mine && some) || (!mine && all)) {
                set.set(v);
                changed = true;
            }
        }
    }
    return set;
}

bool oracle_complies(const ParityGame&, const LassoRun& run, const StrategyTemplate& t)
{
    // two laps: the second lap is exactly what repeats forever
    auto edges = unrolled_edges(run, 2);
    const std::size_t tail = run.cycle.size();
    std::set<std::pair<VertexId, VertexId>> infinitely(edges.end() - static_cast<std::ptrdiff_t>(tail), edges.end());
    std::set<VertexId> recurring(run.cycle.begin(), run.cycle.end());
    for (auto [a, b] : edges)
        for (auto e : t.unsafe)
            if (e.from == a && e.to == b) return false;
    for (auto e : t.colive)
        if (infinitely.count({e.from, e.to})) return false;
    for (const auto& grp : t.live_groups) {
        bool source_recurs = false, edge_recurs = false;
        for (auto e : grp) {
            if (recurring.count(e.from)) source_recurs = true;
            if (infinitely.count({e.from, e.to})) edge_recurs = true;
        }
        if (source_recurs && !edge_recurs) return false;
    }
    return true;
}

bool oracle_accepting(const ParityGame& g, const LassoRun& run)
{
    for (VertexId v : run.cycle)
        if (g.color(v) == 2) return true;
    return false;
}

bool oracle_task_holds(const TaskFormula& t, const std::vector<std::vector<PropId>>& prefix,
                       const std::vector<std::vector<PropId>>& cycle)
{
    for (const auto& psi : t.safety) {
        for (const auto& l : prefix)
            if (!eval_prop(psi, l)) return false;
        for (const auto& l : cycle)
            if (!eval_prop(psi, l)) return false;
    }
    for (const auto& phi : t.recurrence) {
        bool seen = false;
        for (const auto& l : cycle) seen = seen || eval_prop(phi, l);
        if (!seen) return false;
    }
    return true;
}

void for_each_lasso(const ParityGame& g, const Region& starts, std::size_t max_len,
                    const std::function<void(VertexId, const std::function<void(VertexId)>&)>& succ,
                    const std::function<void(const LassoRun&)>& visit)
{
    (void)g;
    std::vector<VertexId> walk;
    std::function<void()> extend = [&]() {
        const VertexId last = walk.back();
        // close a cycle at every earlier occurrence of the last vertex
        for (std::size_t j = 0; j + 1 < walk.size(); ++j)
            if (walk[j] == last) {
                LassoRun run{{walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(j)},
                             {walk.begin() + static_cast<std::ptrdiff_t>(j), walk.end() - 1}};
                visit(run);
            }
        if (walk.size() > max_len) return;
        succ(last, [&](VertexId w) {
            walk.push_back(w);
            extend();
            walk.pop_back();
        });
    };
    for (VertexId s : starts.members()) {
        walk.assign(1, s);
        extend();
    }
}

std::optional<LassoRun> oracle_permissiveness_counterexample(const ParityGame& g, const TemplatePair& p,
                                                             std::size_t max_len)
{
    std::optional<LassoRun> found;
    auto all_edges = [&](VertexId v, const std::function<void(VertexId)>& visit) {
        if (found) return;
        for (VertexId w : g.out(v)) visit(w);
    };
    for_each_lasso(g, p.winning, max_len, all_edges, [&](const LassoRun& run) {
        if (!found && oracle_accepting(g, run) && !oracle_complies(g, run, p.human)) found = run;
    });
    return found;
}

std::optional<LassoRun> oracle_sufficiency_counterexample(const ParityGame& g, const TemplatePair& p,
                                                          std::size_t max_len)
{
    const auto n = g.num_vertices();
    std::vector<VertexId> robots;
    std::vector<std::vector<VertexId>> options;
    for (VertexId v = 0; v < n; ++v) {
        if (g.owner(v) != Player::Robot) continue;
        std::vector<VertexId> opts;
        for (VertexId w : g.out(v))
            if (!p.robot.is_unsafe({v, w})) opts.push_back(w);
        if (opts.empty()) continue;
        robots.push_back(v);
        options.push_back(std::move(opts));
    }
    std::vector<std::size_t> pick(robots.size(), 0);
    std::vector<std::int64_t> sigma(n, -1);
    while (true) {
        for (std::size_t i = 0; i < robots.size(); ++i) sigma[robots[i]] = options[i][pick[i]];
        auto succ = [&](VertexId v, const std::function<void(VertexId)>& visit) {
            if (g.owner(v) == Player::Robot) {
                if (sigma[v] >= 0) visit(static_cast<VertexId>(sigma[v]));
                return;
            }
            for (VertexId w : g.out(v))
                if (!p.human.is_unsafe({v, w})) visit(w);
        };
        bool robot_complies = true;
        for_each_lasso(g, p.winning, 2 * n, succ, [&](const LassoRun& run) {
            if (robot_complies && !oracle_complies(g, run, p.robot)) robot_complies = false;
        });
        if (robot_complies) {
            std::optional<LassoRun> found;
            for_each_lasso(g, p.winning, max_len, succ, [&](const LassoRun& run) {
                if (!found && !oracle_accepting(g, run) && oracle_complies(g, run, p.human)) found = run;
            });
            if (found) return found;
        }
        std::size_t i = 0;
        for (; i < pick.size(); ++i) {
            if (++pick[i] < options[i].size()) break;
            pick[i] = 0;
        }
        if (i == pick.size()) break;
    }
    return std::nullopt;
}

bool oracle_positional(const ParityGame& g, const LassoRun& run)
{
    auto edges = unrolled_edges(run, 1);
    std::vector<std::set<VertexId>> used(g.num_vertices());
    for (auto [a, b] : edges)
        if (g.owner(a) == Player::Robot) used[a].insert(b);
    return std::all_of(used.begin(), used.end(), [](const auto& s) { return s.size() <= 1; });
}

} // namespace hrli::testing
