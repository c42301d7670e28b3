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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hrli {

enum class Player : std::uint8_t { Robot, Human };

constexpr Player opponent(Player p) noexcept { return p == Player::Robot ? Player::Human : Player::Robot; }
constexpr char player_code(Player p) noexcept { return p == Player::Robot ? 'R' : 'H'; }
const char* player_name(Player p) noexcept;

using StateId = std::uint32_t;
using PropId = std::uint16_t;

/// Ultimately periodic run `prefix · cycle^ω` over state (or vertex) ids.
struct LassoRun {
    std::vector<std::uint32_t> prefix;
    std::vector<std::uint32_t> cycle;

    friend bool operator==(const LassoRun&, const LassoRun&) = default;
};

/// Turn-based reactive planning domain: states owned by the robot or the human,
/// labeled with proposition sets, joined by action edges.
///
/// Immutable once built (see DomainBuilder). Successor lists are sorted by
/// ascending target id and carry an optional action description per edge.
class PlanningDomain {
public:
    std::size_t num_states() const noexcept { return owners_.size(); }
    std::size_t num_edges() const noexcept { return targets_.size(); }

    const std::vector<std::string>& propositions() const noexcept { return props_; }
    std::optional<PropId> find_proposition(std::string_view name) const;

    StateId initial() const noexcept { return initial_; }
    Player owner(StateId s) const { return owners_[s]; }
    std::span<const PropId> label(StateId s) const
    {
        return {labels_.data() + label_off_[s], labels_.data() + label_off_[s + 1]};
    }
    bool holds(StateId s, PropId p) const;
    const std::string& display(StateId s) const { return display_[s]; }
    /// Display text if present, otherwise the numeric id.
    std::string name(StateId s) const;

    /// Unchecked successor span; see hrli::successors for the checked variant.
    std::span<const StateId> out(StateId s) const
    {
        return {targets_.data() + edge_off_[s], targets_.data() + edge_off_[s + 1]};
    }
    /// Global edge index range of `s`.
    std::size_t edge_begin(StateId s) const { return edge_off_[s]; }
    std::size_t edge_end(StateId s) const { return edge_off_[s + 1]; }
    StateId edge_target(std::size_t e) const { return targets_[e]; }
    const std::string& edge_action(std::size_t e) const { return actions_[e]; }
    std::optional<std::size_t> find_edge(StateId from, StateId to) const;

    friend bool operator==(const PlanningDomain&, const PlanningDomain&) = default;

private:
    friend class DomainBuilder;

    std::vector<std::string> props_;
    std::vector<Player> owners_;
    std::vector<std::uint32_t> label_off_{0};
    std::vector<PropId> labels_;
    std::vector<std::string> display_;
    std::vector<std::uint32_t> edge_off_{0};
    std::vector<StateId> targets_;
    std::vector<std::string> actions_;
    StateId initial_ = 0;
};

class DomainBuilder {
public:
    PropId add_proposition(std::string name);
    StateId add_state(Player owner, std::vector<PropId> label, std::string display = {});
    /// Duplicate (from, to) pairs collapse onto the first action text.
    void add_edge(StateId from, StateId to, std::string action = {});
    void set_initial(StateId s) { initial_ = s; }
    std::size_t num_states() const noexcept { return states_.size(); }

    PlanningDomain build() &&;

private:
    struct PendingState {
        Player owner;
        std::vector<PropId> label;
        std::string display;
    };
    struct PendingEdge {
        StateId from, to;
        std::string action;
    };
    std::vector<std::string> props_;
    std::vector<PendingState> states_;
    std::vector<PendingEdge> edges_;
    StateId initial_ = 0;
};

/// Successors of `s` in ascending id order. Throws LookupError for unknown ids.
std::vector<StateId> successors(const PlanningDomain& d, StateId s);

/// Well-formedness findings; empty iff the domain satisfies every invariant
/// (strict turn alternation, no dead ends, valid initial state, labels within AP).
std::vector<std::string> validate_domain(const PlanningDomain& d);

/// Textual domain document (grammar in docs/formats.md).
std::string serialize_domain(const PlanningDomain& d);
PlanningDomain parse_domain(std::string_view text);

} // namespace hrli
