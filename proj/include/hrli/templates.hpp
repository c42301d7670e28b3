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

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hrli/error.hpp"
#include "hrli/game.hpp"

namespace hrli {

struct GameEdge {
    VertexId from = 0;
    VertexId to = 0;
    friend auto operator<=>(const GameEdge&, const GameEdge&) = default;
};

/// Constraints on one agent's edges.
///
/// unsafe: never taken. colive: taken finitely often. live_groups: whenever a
/// source of a group recurs, some edge of that group recurs. Edge lists are
/// kept sorted and duplicate free.
struct StrategyTemplate {
    Player agent = Player::Robot;
    std::vector<GameEdge> unsafe;
    std::vector<GameEdge> colive;
    std::vector<std::vector<GameEdge>> live_groups;

    bool is_unsafe(GameEdge e) const;
    bool is_colive(GameEdge e) const;
    /// Indices of the live groups with an edge leaving `v`.
    std::vector<std::size_t> groups_at(VertexId v) const;
    bool empty() const noexcept { return unsafe.empty() && colive.empty() && live_groups.empty(); }
    /// Sorts and dedups every list.
    void normalize();

    friend bool operator==(const StrategyTemplate&, const StrategyTemplate&) = default;
};

/// Structural findings; empty iff every edge exists in `g`, belongs to the
/// template's agent, unsafe and colive are disjoint, no live group is empty and
/// no live edge is unsafe.
std::vector<std::string> validate_template(const ParityGame& g, const StrategyTemplate& t);

struct TemplatePair {
    StrategyTemplate robot{Player::Robot, {}, {}, {}};
    StrategyTemplate human{Player::Human, {}, {}, {}};
    /// Cooperative winning region the guarantees refer to.
    Region winning;
    /// Attractor layer of each vertex of `winning` (0 on color-2 vertices),
    /// kNoRank outside.
    std::vector<std::uint32_t> rank;

    static constexpr std::uint32_t kNoRank = 0xffffffffu;
};

/// The initial vertex cannot cooperatively satisfy the objective.
class NoCooperativeSolution : public SynthesisError {
public:
    explicit NoCooperativeSolution(Region winning)
        : SynthesisError("no cooperative solution from the initial vertex"), winning_(std::move(winning)) {}
    const Region& winning() const noexcept { return winning_; }

private:
    Region winning_;
};

/// Rank-layered construction over the cooperative region W:
///  - unsafe: every edge from W to outside W, for the agent owning its source;
///  - layering inside W starts at the color-2 vertices; robot-forced rounds
///    alternate with batches of human vertices that merely can enter the
///    layered set, each batch yielding one human live group made of all its
///    edges into lower layers;
///  - every robot vertex above layer 0 gets a live group of its
///    layer-decreasing edges unless those are all its edges inside W.
/// Throws NoCooperativeSolution when the initial vertex is outside W and
/// UnsupportedColor when colors leave {1, 2}.
TemplatePair synthesize_templates(const ParityGame& g);

struct ComplianceReport {
    bool compliant = true;
    std::vector<std::string> violations;
};

/// Checks the lasso against the template. Throws ConfigError for malformed lassos.
ComplianceReport check_run_compliance(const ParityGame& g, const LassoRun& run, const StrategyTemplate& t);

/// Whether the lasso's run visits color 2 infinitely often.
bool lasso_accepting(const ParityGame& g, const LassoRun& run);

struct Counterexample {
    int condition = 1; // 1 permissiveness, 2 sufficiency
    std::string reason;
    LassoRun run;
};

struct VerificationReport {
    bool permissive = true;
    bool sufficient = true;
    std::size_t strategies_checked = 0;
    std::vector<Counterexample> counterexamples;

    bool ok() const noexcept { return permissive && sufficient; }
};

struct VerifyOptions {
    std::size_t max_vertices = 14;
    std::size_t max_strategies = 1u << 20;
};

/// Exact check of the two guarantees on small games.
///  (i)  every run starting in `p.winning` that visits color 2 infinitely often
///       complies with the human template;
///  (ii) for every positional robot strategy complying with the robot template,
///       every run starting in `p.winning` that complies with the human template
///       visits color 2 infinitely often.
/// Condition (i) is decided by SCC analysis; (ii) enumerates positional robot
/// strategies and searches each for a compliant rejecting lasso.
/// Throws BoundExceeded beyond the configured limits.
VerificationReport verify_template_pair(const ParityGame& g, const TemplatePair& p, const VerifyOptions& opts = {});

/// Vertices from which the robot can force acceptance against every human that
/// complies with `human`. Live groups are credited: a human vertex counts as
/// progressing when all edges of one of its groups progress and none of its
/// permitted edges leave the current candidate region. Unsafe human edges are
/// pruned and colive ones are ignored for progress.
/// Throws LookupError when the template names edges absent from `g`.
Region robot_win_under_template(const ParityGame& g, const StrategyTemplate& human);

/// Uses of robot colive edges so far in a run.
using ColiveUsage = std::map<GameEdge, std::uint32_t>;
constexpr std::uint32_t kDefaultColiveBudget = 3;

/// Which robot edges count as candidates before the template filters apply.
enum class RobotChoice {
    /// Every outgoing edge; live groups are met by randomized selection.
    AllEdges,
    /// At a source of a robot live group only that group's edges.
    LiveGroups,
};

/// Robot edges enabled at `v`, ascending by target: the candidates minus
/// unsafe edges, minus colive edges whose budget is spent, minus edges leaving
/// the winning region when `v` lies inside it. An empty result means the
/// templates must be re-synthesized.
std::vector<GameEdge> enabled_robot_actions(const ParityGame& g, const TemplatePair& p, VertexId v,
                                            const ColiveUsage& usage = {},
                                            std::uint32_t budget = kDefaultColiveBudget,
                                            RobotChoice choice = RobotChoice::AllEdges);

/// Textual template export (format in docs/formats.md).
std::string export_templates(const TemplatePair& p);

} // namespace hrli
