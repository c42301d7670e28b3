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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrli/domain.hpp"
#include "hrli/logic.hpp"
#include "hrli/region.hpp"

namespace hrli {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Domain state and post-step monitor state a product vertex stands for.
struct Origin {
    StateId state = 0;
    std::uint32_t monitor = 0;
    friend bool operator==(const Origin&, const Origin&) = default;
};

/// Explicit two-player game graph with colors in {1, 2}.
///
/// Forward and reverse adjacency are stored in CSR form; forward successor
/// lists are sorted by target id, so edge ids order edges by (source, target).
class ParityGame {
public:
    std::size_t num_vertices() const noexcept { return owner_.size(); }
    std::size_t num_edges() const noexcept { return dst_.size(); }
    VertexId initial() const noexcept { return initial_; }

    Player owner(VertexId v) const { return owner_[v]; }
    int color(VertexId v) const { return color_[v]; }
    const Origin& origin(VertexId v) const { return origin_[v]; }

    std::span<const VertexId> out(VertexId v) const { return {dst_.data() + off_[v], dst_.data() + off_[v + 1]}; }
    std::span<const VertexId> in(VertexId v) const { return {rsrc_.data() + roff_[v], rsrc_.data() + roff_[v + 1]}; }
    EdgeId edge_begin(VertexId v) const { return off_[v]; }
    EdgeId edge_end(VertexId v) const { return off_[v + 1]; }
    VertexId edge_source(EdgeId e) const { return src_[e]; }
    VertexId edge_target(EdgeId e) const { return dst_[e]; }
    std::optional<EdgeId> find_edge(VertexId from, VertexId to) const;

    /// Vertices of color 2.
    Region accepting() const;
    /// Vertex with the given origin, if reachable.
    std::optional<VertexId> find_origin(const Origin& o) const;

    /// The same game re-rooted at `v`.
    ParityGame with_initial(VertexId v) const;

    /// Domain this game was built from (null for hand-built games).
    const std::shared_ptr<const PlanningDomain>& domain() const noexcept { return domain_; }
    /// Display text of a vertex (domain display when available).
    std::string vertex_name(VertexId v) const;
    /// Display text of an edge: the domain action if known, otherwise "u->v".
    std::string edge_name(VertexId from, VertexId to) const;

    friend bool operator==(const ParityGame& a, const ParityGame& b)
    {
        return a.owner_ == b.owner_ && a.color_ == b.color_ && a.origin_ == b.origin_ && a.off_ == b.off_ &&
               a.dst_ == b.dst_ && a.initial_ == b.initial_;
    }

private:
    friend class GameBuilder;

    std::vector<Player> owner_;
    std::vector<std::uint8_t> color_;
    std::vector<Origin> origin_;
    std::vector<std::uint32_t> off_{0};
    std::vector<VertexId> src_;
    std::vector<VertexId> dst_;
    std::vector<std::uint32_t> roff_{0};
    std::vector<VertexId> rsrc_;
    VertexId initial_ = 0;
    std::shared_ptr<const PlanningDomain> domain_;
};

class GameBuilder {
public:
    /// Throws UnsupportedColor for colors outside {1, 2}.
    VertexId add_vertex(Player owner, int color, Origin origin = {});
    /// Duplicate edges collapse. Throws LookupError on unknown vertices.
    void add_edge(VertexId from, VertexId to);
    void set_initial(VertexId v) { initial_ = v; }
    void set_domain(std::shared_ptr<const PlanningDomain> d) { domain_ = std::move(d); }
    std::size_t num_vertices() const noexcept { return owner_.size(); }

    /// Throws ConfigError when a vertex has no successor or the initial vertex is unknown.
    ParityGame build() &&;

private:
    std::vector<Player> owner_;
    std::vector<std::uint8_t> color_;
    std::vector<Origin> origin_;
    std::vector<std::pair<VertexId, VertexId>> edges_;
    VertexId initial_ = 0;
    std::shared_ptr<const PlanningDomain> domain_;
};

/// Reachable product of a domain and a monitor. The monitor reads the label of
/// each domain state on entry (including the initial one); the vertex color is
/// the color of the resulting monitor state.
ParityGame product(std::shared_ptr<const PlanningDomain> d, const ParityMonitor& m,
                   std::size_t vertex_cap = 5'000'000);

enum class AttractorMode { RobotForces, HumanForces, Cooperative };

/// Least fixpoint of the attractor operator for `target`.
Region attractor(const ParityGame& g, const Region& target, AttractorMode mode);
/// Attractor inside the subgame `arena`: edges leaving the arena are ignored.
Region attractor(const ParityGame& g, const Region& target, AttractorMode mode, const Region& arena);

/// Vertices with some successor in `z`.
Region cooperative_pre(const ParityGame& g, const Region& z);

/// Vertices from which some infinite run visits color 2 infinitely often.
Region cooperative_buchi(const ParityGame& g);

/// Textual game export (format in docs/formats.md).
std::string export_game(const ParityGame& g);

} // namespace hrli
