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
#include <string>
#include <vector>

#include "hrli/domain.hpp"

namespace hrli {

/// Grid layout for the cooking domain. Characters:
///   'X' counter, '.' floor, 'O' onion dispenser, 'P' pot (exactly one),
///   'S' serving window, 'H' / 'R' human / robot start (floor).
struct KitchenConfig {
    std::vector<std::string> layout;
    int pot_capacity = 3;
    std::size_t state_cap = 1'000'000;
    Player first = Player::Human;

    /// The default desk-scale layout (13 floor cells, pot in the middle).
    static KitchenConfig desk();
};

enum class Holding : std::uint8_t { Nothing, Onion, Soup };

struct KitchenState {
    std::uint8_t human_cell = 0; // index into Kitchen::floor
    std::uint8_t robot_cell = 0;
    Holding human = Holding::Nothing;
    Holding robot = Holding::Nothing;
    std::uint8_t pot = 0;       // onions in the pot
    std::uint8_t delivered = 0; // onions in the soup delivered by the last move, 0 if none
    Player to_move = Player::Human;

    friend bool operator==(const KitchenState&, const KitchenState&) = default;
};

/// Turn-based cooking domain with a single shared pot and onion-only soups.
///
/// A soup is picked up from the pot by an empty-handed agent and the pot stays
/// locked until that soup is delivered; delivery empties the pot. Cooking is
/// instant. An agent holding an onion may hand it back at an onion dispenser,
/// so a full pot never strands both agents.
///
/// Propositions: delivered_onions_<k> (exactly one holds per state, k = 0
/// meaning no delivery on the last move), pot_count_<k>, human_onion,
/// human_soup, robot_onion, robot_soup, human_turn, human_at_<r>_<c> and
/// robot_at_<r>_<c>.
struct Kitchen {
    KitchenConfig config;
    PlanningDomain domain;
    std::vector<KitchenState> states;
    std::vector<std::pair<int, int>> floor; // (row, col) of each floor cell

    int rows() const { return static_cast<int>(config.layout.size()); }
    int cols() const { return config.layout.empty() ? 0 : static_cast<int>(config.layout.front().size()); }
    char tile(int r, int c) const { return config.layout[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]; }
};

Kitchen build_kitchen(const KitchenConfig& config);

} // namespace hrli
