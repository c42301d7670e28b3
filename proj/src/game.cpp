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

#include "hrli/game.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "hrli/error.hpp"

namespace hrli {

std::optional<EdgeId> ParityGame::find_edge(VertexId from, VertexId to) const
{
    if (from >= num_vertices()) return std::nullopt;
    auto succ = out(from);
    auto it = std::lower_bound(succ.begin(), succ.end(), to);
    if (it == succ.end() || *it != to) return std::nullopt;
    return off_[from] + static_cast<EdgeId>(it - succ.begin());
}

Region ParityGame::accepting() const
{
    Region r(num_vertices());
    for (VertexId v = 0; v < num_vertices(); ++v)
        if (color_[v] == 2) r.set(v);
    return r;
}

std::optional<VertexId> ParityGame::find_origin(const Origin& o) const
{
    for (VertexId v = 0; v < num_vertices(); ++v)
        if (origin_[v] == o) return v;
    return std::nullopt;
}

ParityGame ParityGame::with_initial(VertexId v) const
{
    if (v >= num_vertices()) throw LookupError("unknown vertex " + std::to_string(v));
    ParityGame g = *this;
    g.initial_ = v;
    return g;
}

std::string ParityGame::vertex_name(VertexId v) const
{
    if (domain_) return domain_->name(origin_[v].state);
    return std::to_string(v);
}

std::string ParityGame::edge_name(VertexId from, VertexId to) const
{
    if (domain_) {
        if (auto e = domain_->find_edge(origin_[from].state, origin_[to].state)) {
            const auto& a = domain_->edge_action(*e);
            if (!a.empty()) return a;
        }
    }
    return std::to_string(from) + "->" + std::to_string(to);
}

VertexId GameBuilder::add_vertex(Player owner, int color, Origin origin)
{
    if (color != 1 && color != 2)
        throw UnsupportedColor("vertex color " + std::to_string(color) + " outside {1,2}");
    owner_.push_back(owner);
    color_.push_back(static_cast<std::uint8_t>(color));
    origin_.push_back(origin);
    return static_cast<VertexId>(owner_.size() - 1);
}

void GameBuilder::add_edge(VertexId from, VertexId to)
{
    if (from >= owner_.size() || to >= owner_.size())
        throw LookupError("edge (" + std::to_string(from) + "," + std::to_string(to) + ") references unknown vertex");
    edges_.emplace_back(from, to);
}

ParityGame GameBuilder::build() &&
{
    const auto n = owner_.size();
    if (n == 0) throw ConfigError("game has no vertices");
    if (initial_ >= n) throw ConfigError("initial vertex " + std::to_string(initial_) + " is not a vertex");
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    ParityGame g;
    g.owner_ = std::move(owner_);
    g.color_ = std::move(color_);
    g.origin_ = std::move(origin_);
    g.initial_ = initial_;
    g.domain_ = std::move(domain_);
    g.off_.assign(n + 1, 0);
    g.roff_.assign(n + 1, 0);
    for (auto [u, v] : edges_) {
        ++g.off_[u + 1];
        ++g.roff_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.off_[i + 1] += g.off_[i];
        g.roff_[i + 1] += g.roff_[i];
    }
    g.src_.reserve(edges_.size());
    g.dst_.reserve(edges_.size());
    for (auto [u, v] : edges_) {
        g.src_.push_back(u);
        g.dst_.push_back(v);
    }
    g.rsrc_.resize(edges_.size());
    std::vector<std::uint32_t> fill(g.roff_.begin(), g.roff_.end() - 1);
    for (auto [u, v] : edges_) g.rsrc_[fill[v]++] = u;
    for (VertexId v = 0; v < n; ++v)
        if (g.off_[v] == g.off_[v + 1]) throw ConfigError("vertex " + std::to_string(v) + " has no successor");
    return g;
}

ParityGame product(std::shared_ptr<const PlanningDomain> d, const ParityMonitor& m, std::size_t vertex_cap)
{
    if (!d) throw ConfigError("product needs a domain");
    if (m.propositions != d->propositions())
        throw ConfigError("monitor propositions differ from the domain propositions");
    GameBuilder b;
    b.set_domain(d);
    const std::uint64_t msize = m.size();
    std::unordered_map<std::uint64_t, VertexId> index;
    std::vector<Origin> origins;
    std::deque<VertexId> queue;
    auto intern = [&](StateId s, std::uint32_t q) {
        auto [it, fresh] = index.try_emplace(std::uint64_t{s} * msize + q, static_cast<VertexId>(origins.size()));
        if (fresh) {
            if (origins.size() >= vertex_cap) throw CapacityError("product vertex cap exceeded", vertex_cap);
            origins.push_back({s, q});
            b.add_vertex(d->owner(s), m.color(q), {s, q});
            queue.push_back(it->second);
        }
        return it->second;
    };
    const StateId s0 = d->initial();
    b.set_initial(intern(s0, m.step(m.initial, d->label(s0))));
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop_front();
        const Origin o = origins[v];
        for (StateId t : d->out(o.state)) b.add_edge(v, intern(t, m.step(o.monitor, d->label(t))));
    }
    return std::move(b).build();
}

Region attractor(const ParityGame& g, const Region& target, AttractorMode mode)
{
    return attractor(g, target, mode, Region(g.num_vertices(), true));
}

Region attractor(const ParityGame& g, const Region& target, AttractorMode mode, const Region& arena)
{
    const auto n = g.num_vertices();
    Region attr = target & arena;
    std::vector<std::uint32_t> remaining(n, 0);
    for (VertexId v = 0; v < n; ++v) {
        if (!arena[v]) continue;
        for (VertexId w : g.out(v))
            if (arena[w]) ++remaining[v];
    }
    auto existential = [&](VertexId v) {
        switch (mode) {
        case AttractorMode::Cooperative: return true;
        case AttractorMode::RobotForces: return g.owner(v) == Player::Robot;
        case AttractorMode::HumanForces: return g.owner(v) == Player::Human;
        }
        return true;
    };
    std::vector<VertexId> work = attr.members();
    while (!work.empty()) {
        VertexId w = work.back();
        work.pop_back();
        for (VertexId v : g.in(w)) {
            if (!arena[v] || attr[v]) continue;
            if (existential(v) || --remaining[v] == 0) {
                attr.set(v);
                work.push_back(v);
            }
        }
    }
    return attr;
}

Region cooperative_pre(const ParityGame& g, const Region& z)
{
    Region r(g.num_vertices());
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        for (VertexId w : g.out(v))
            if (z[w]) {
                r.set(v);
                break;
            }
    return r;
}

Region cooperative_buchi(const ParityGame& g)
{
    const Region f = g.accepting();
    Region z(g.num_vertices(), true);
    while (true) {
        Region next = attractor(g, f & cooperative_pre(g, z), AttractorMode::Cooperative);
        if (next == z) return z;
        z = std::move(next);
    }
}

// Layout:
//
//   hrli-game 1
//   initial <v>
//   vertex <v> <R|H> color <c> origin <state> <monitor>
//   edge <u> <v>
std::string export_game(const ParityGame& g)
{
    std::ostringstream os;
    os << "hrli-game 1\ninitial " << g.initial() << '\n';
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        os << "vertex " << v << ' ' << player_code(g.owner(v)) << " color " << g.color(v) << " origin "
           << g.origin(v).state << ' ' << g.origin(v).monitor << '\n';
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        for (VertexId w : g.out(v)) os << "edge " << v << ' ' << w << '\n';
    return os.str();
}

} // namespace hrli
