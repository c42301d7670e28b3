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

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "hrli/region.hpp"

namespace hrli::detail {

/// Strongly connected components of the subgraph on `members` with edges given
/// by `succ(v, visit)`, which calls `visit(w)` for every successor w.
/// Successors outside `members` are ignored.
struct SccResult {
    std::vector<std::int32_t> comp; // -1 outside the subgraph
    std::vector<bool> nontrivial;   // per component: has a cycle
    std::int32_t count = 0;
};

template <class Succ>
SccResult strongly_connected(std::size_t n, const Region& members, Succ&& succ)
{
    SccResult r;
    r.comp.assign(n, -1);
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::int32_t counter = 0;

    struct Frame {
        std::uint32_t v;
        std::vector<std::uint32_t> next;
        std::size_t pos;
    };
    auto successors_of = [&](std::uint32_t v) {
        std::vector<std::uint32_t> out;
        succ(v, [&](std::uint32_t w) {
            if (members[w]) out.push_back(w);
        });
        return out;
    };
    std::vector<bool> self_loop(n, false);
    for (std::uint32_t root : members.members()) {
        if (index[root] >= 0) continue;
        std::vector<Frame> frames;
        auto open = [&](std::uint32_t v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = true;
            frames.push_back({v, successors_of(v), 0});
            for (auto w : frames.back().next)
                if (w == v) self_loop[v] = true;
        };
        open(root);
        while (!frames.empty()) {
            auto& f = frames.back();
            if (f.pos < f.next.size()) {
                std::uint32_t w = f.next[f.pos++];
                if (index[w] < 0) {
                    open(w);
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            std::uint32_t v = f.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == index[v]) {
                std::size_t size = 0;
                bool loop = false;
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    r.comp[w] = r.count;
                    loop = loop || self_loop[w];
                    ++size;
                } while (w != v);
                r.nontrivial.push_back(size > 1 || loop);
                ++r.count;
            }
        }
    }
    return r;
}

/// Shortest path from `from` to `to` (both included) using `succ` restricted
/// to `members`; empty if unreachable. For from == to the path has one vertex.
template <class Succ>
std::vector<std::uint32_t> shortest_path(std::size_t n, const Region& members, std::uint32_t from, std::uint32_t to,
                                         Succ&& succ)
{
    std::vector<std::int64_t> parent(n, -2);
    std::deque<std::uint32_t> q{from};
    parent[from] = -1;
    while (!q.empty() && parent[to] == -2) {
        auto v = q.front();
        q.pop_front();
        succ(v, [&](std::uint32_t w) {
            if (members[w] && parent[w] == -2) {
                parent[w] = v;
                q.push_back(w);
            }
        });
    }
    if (parent[to] == -2) return {};
    std::vector<std::uint32_t> path;
    for (std::int64_t v = to; v >= 0; v = parent[static_cast<std::size_t>(v)]) path.push_back(static_cast<std::uint32_t>(v));
    std::reverse(path.begin(), path.end());
    return path;
}

/// Shortest path from any vertex of `sources` to `to`.
template <class Succ>
std::vector<std::uint32_t> shortest_path_from_set(std::size_t n, const Region& members, const Region& sources,
                                                  std::uint32_t to, Succ&& succ)
{
    std::vector<std::int64_t> parent(n, -2);
    std::deque<std::uint32_t> q;
    for (auto s : sources.members())
        if (members[s]) {
            parent[s] = -1;
            q.push_back(s);
        }
    while (!q.empty() && parent[to] == -2) {
        auto v = q.front();
        q.pop_front();
        succ(v, [&](std::uint32_t w) {
            if (members[w] && parent[w] == -2) {
                parent[w] = v;
                q.push_back(w);
            }
        });
    }
    if (parent[to] == -2) return {};
    std::vector<std::uint32_t> path;
    for (std::int64_t v = to; v >= 0; v = parent[static_cast<std::size_t>(v)]) path.push_back(static_cast<std::uint32_t>(v));
    std::reverse(path.begin(), path.end());
    return path;
}

/// Closed walk: path from `from` to `to`, excluding `to` (for concatenation).
template <class Succ>
std::vector<std::uint32_t> path_excluding_end(std::size_t n, const Region& members, std::uint32_t from, std::uint32_t to,
                                              Succ&& succ)
{
    auto p = shortest_path(n, members, from, to, succ);
    if (!p.empty()) p.pop_back();
    return p;
}

} // namespace hrli::detail
