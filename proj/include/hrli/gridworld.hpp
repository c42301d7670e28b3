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
#include <string>
#include <vector>

#include "hrli/domain.hpp"

namespace hrli {

enum class Cell : std::uint8_t { Empty, Human, Robot };

/// Occupancy map plus whose turn it is.
struct GridBoard {
    int rows = 0;
    int cols = 0;
    std::vector<Cell> cells; // row-major
    Player to_move = Player::Human;

    Cell at(int r, int c) const { return cells[static_cast<std::size_t>(r * cols + c)]; }
    int count(Cell kind) const;
    friend bool operator==(const GridBoard&, const GridBoard&) = default;
};

struct GridworldConfig {
    int rows = 3;
    int cols = 3;
    int max_objects_per_agent = 3;
    std::size_t state_cap = 1'000'000;
    Player first = Player::Human;
    /// Start board; defaults to the empty board with `first` to move.
    std::optional<GridBoard> start;
};

/// Block-manipulation domain: each turn the mover places one of its blocks on an
/// empty cell or removes one of its own blocks; it passes only when neither is possible.
///
/// Propositions, in declaration order: occ_<r>_<c> for every cell (1-based),
/// adj (no two occupied cells are 4-adjacent), diag (a full diagonal),
/// major (at least max(1, floor(rows*cols/2)) occupied cells), diag_main, diag_anti,
/// human_turn, h_cap, r_cap (mover at its block limit), empty.
struct Gridworld {
    GridworldConfig config;
    PlanningDomain domain;
    std::vector<GridBoard> boards; // indexed by StateId

    std::optional<StateId> find(const GridBoard& b) const;
};

Gridworld build_gridworld(const GridworldConfig& config);
inline Gridworld build_gridworld(int rows, int cols, int max_objects_per_agent)
{
    GridworldConfig c;
    c.rows = rows;
    c.cols = cols;
    c.max_objects_per_agent = max_objects_per_agent;
    return build_gridworld(c);
}

/// Occupied-cell threshold for `major`.
int gridworld_major_threshold(int rows, int cols);

/// Board from a picture such as "..H/.R./H.." (rows separated by '/').
GridBoard parse_board(const std::string& picture, Player to_move);

/// Scripted human that keeps (re)building the south-west to north-east diagonal:
/// place on an empty anti-diagonal cell, otherwise clear an own off-diagonal block,
/// otherwise remove an own diagonal block (starting from the top-right corner).
StateId diagonal_builder_move(const Gridworld& gw, StateId s);

} // namespace hrli
