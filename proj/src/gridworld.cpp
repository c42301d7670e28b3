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

#include "hrli/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "hrli/error.hpp"

namespace hrli {

namespace {

std::string cell_name(int r, int c) { return "(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")"; }

std::string board_key(const GridBoard& b)
{
    std::string key(b.cells.size() + 1, '\0');
    for (std::size_t i = 0; i < b.cells.size(); ++i) key[i] = static_cast<char>(b.cells[i]);
    key.back() = b.to_move == Player::Human ? 'H' : 'R';
    return key;
}

std::string board_display(const GridBoard& b)
{
    std::string s;
    s += player_code(b.to_move);
    s += '|';
    for (int r = 0; r < b.rows; ++r) {
        if (r) s += '/';
        for (int c = 0; c < b.cols; ++c) {
            auto v = b.at(r, c);
            s += v == Cell::Empty ? '.' : v == Cell::Human ? 'H' : 'R';
        }
    }
    return s;
}

struct GridProps {
    PropId occ0, adj, diag, major, diag_main, diag_anti, human_turn, h_cap, r_cap, empty;
};

bool diagonal_full(const GridBoard& b, bool anti)
{
    const int n = std::min(b.rows, b.cols);
    for (int i = 0; i < n; ++i) {
        int c = anti ? b.cols - 1 - i : i;
        if (b.at(i, c) == Cell::Empty) return false;
    }
    return n > 0;
}

std::vector<PropId> grid_label(const GridBoard& b, const GridProps& p, int cap)
{
    std::vector<PropId> label;
    int occupied = 0;
    bool nonadjacent = true;
    for (int r = 0; r < b.rows; ++r)
        for (int c = 0; c < b.cols; ++c) {
            if (b.at(r, c) == Cell::Empty) continue;
            ++occupied;
            label.push_back(static_cast<PropId>(p.occ0 + r * b.cols + c));
            if (c + 1 < b.cols && b.at(r, c + 1) != Cell::Empty) nonadjacent = false;
            if (r + 1 < b.rows && b.at(r + 1, c) != Cell::Empty) nonadjacent = false;
        }
    const bool dm = diagonal_full(b, false);
    const bool da = diagonal_full(b, true);
    if (nonadjacent) label.push_back(p.adj);
    if (dm || da) label.push_back(p.diag);
    if (occupied >= gridworld_major_threshold(b.rows, b.cols)) label.push_back(p.major);
    if (dm) label.push_back(p.diag_main);
    if (da) label.push_back(p.diag_anti);
    if (b.to_move == Player::Human) label.push_back(p.human_turn);
    if (b.count(Cell::Human) >= cap) label.push_back(p.h_cap);
    if (b.count(Cell::Robot) >= cap) label.push_back(p.r_cap);
    if (occupied == 0) label.push_back(p.empty);
    return label;
}

struct GridMove {
    GridBoard next;
    std::string action;
};

std::vector<GridMove> grid_moves(const GridBoard& b, int cap)
{
    std::vector<GridMove> moves;
    const Cell own = b.to_move == Player::Human ? Cell::Human : Cell::Robot;
    const bool can_place = b.count(own) < cap;
    for (int r = 0; r < b.rows; ++r)
        for (int c = 0; c < b.cols; ++c) {
            auto idx = static_cast<std::size_t>(r * b.cols + c);
            if (b.cells[idx] == Cell::Empty && can_place) {
                GridMove m{b, "place block at " + cell_name(r, c)};
                m.next.cells[idx] = own;
                moves.push_back(std::move(m));
            } else if (b.cells[idx] == own) {
                GridMove m{b, "remove block at " + cell_name(r, c)};
                m.next.cells[idx] = Cell::Empty;
                moves.push_back(std::move(m));
            }
        }
    if (moves.empty()) moves.push_back({b, "pass"});
    for (auto& m : moves) m.next.to_move = opponent(b.to_move);
    return moves;
}

} // namespace

int GridBoard::count(Cell kind) const { return static_cast<int>(std::count(cells.begin(), cells.end(), kind)); }

int gridworld_major_threshold(int rows, int cols) { return std::max(1, rows * cols / 2); }

std::optional<StateId> Gridworld::find(const GridBoard& b) const
{
    for (StateId s = 0; s < boards.size(); ++s)
        if (boards[s] == b) return s;
    return std::nullopt;
}

Gridworld build_gridworld(const GridworldConfig& config)
{
    if (config.rows < 1 || config.cols < 1) throw ConfigError("gridworld needs rows, cols >= 1");
    if (config.max_objects_per_agent < 0) throw ConfigError("max_objects_per_agent must be >= 0");

    Gridworld gw{config, {}, {}};
    DomainBuilder b;
    GridProps p{};
    for (int r = 0; r < config.rows; ++r)
        for (int c = 0; c < config.cols; ++c) {
            auto id = b.add_proposition("occ_" + std::to_string(r + 1) + "_" + std::to_string(c + 1));
            if (r == 0 && c == 0) p.occ0 = id;
        }
    p.adj = b.add_proposition("adj");
    p.diag = b.add_proposition("diag");
    p.major = b.add_proposition("major");
    p.diag_main = b.add_proposition("diag_main");
    p.diag_anti = b.add_proposition("diag_anti");
    p.human_turn = b.add_proposition("human_turn");
    p.h_cap = b.add_proposition("h_cap");
    p.r_cap = b.add_proposition("r_cap");
    p.empty = b.add_proposition("empty");

    GridBoard start{config.rows, config.cols,
                    std::vector<Cell>(static_cast<std::size_t>(config.rows * config.cols), Cell::Empty), config.first};
    if (config.start) {
        start = *config.start;
        if (start.rows != config.rows || start.cols != config.cols ||
            start.cells.size() != static_cast<std::size_t>(config.rows * config.cols))
            throw ConfigError("start board does not match the grid size");
        if (start.count(Cell::Human) > config.max_objects_per_agent ||
            start.count(Cell::Robot) > config.max_objects_per_agent)
            throw ConfigError("start board exceeds max_objects_per_agent");
    }
    std::unordered_map<std::string, StateId> index;
    std::deque<StateId> queue;
    auto intern = [&](const GridBoard& board) {
        auto [it, fresh] = index.try_emplace(board_key(board), static_cast<StateId>(gw.boards.size()));
        if (fresh) {
            if (gw.boards.size() >= config.state_cap) throw CapacityError("gridworld state cap exceeded", config.state_cap);
            gw.boards.push_back(board);
            b.add_state(board.to_move, grid_label(board, p, config.max_objects_per_agent), board_display(board));
            queue.push_back(it->second);
        }
        return it->second;
    };
    b.set_initial(intern(start));
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        auto board = gw.boards[s];
        for (auto& m : grid_moves(board, config.max_objects_per_agent)) {
            StateId t = intern(m.next);
            b.add_edge(s, t, std::move(m.action));
        }
    }
    gw.domain = std::move(b).build();
    return gw;
}

GridBoard parse_board(const std::string& picture, Player to_move)
{
    GridBoard b;
    b.to_move = to_move;
    int cols = -1, rows = 0, cur = 0;
    for (char ch : picture + "/") {
        if (ch == '/') {
            if (cols >= 0 && cur != cols) throw ConfigError("ragged board picture");
            cols = cur;
            cur = 0;
            ++rows;
            continue;
        }
        switch (ch) {
        case '.': b.cells.push_back(Cell::Empty); break;
        case 'H': case 'h': b.cells.push_back(Cell::Human); break;
        case 'R': case 'r': b.cells.push_back(Cell::Robot); break;
        default: throw ConfigError(std::string("bad board character '") + ch + "'");
        }
        ++cur;
    }
    b.rows = rows;
    b.cols = cols;
    return b;
}

StateId diagonal_builder_move(const Gridworld& gw, StateId s)
{
    const auto& d = gw.domain;
    const auto& b = gw.boards[s];
    const int n = std::min(b.rows, b.cols);
    auto on_anti = [&](int r, int c) { return r < n && c == b.cols - 1 - r; };
    auto succ = d.out(s);
    auto pick = [&](auto&& pred) -> std::optional<StateId> {
        for (StateId t : succ)
            if (pred(gw.boards[t])) return t;
        return std::nullopt;
    };
    // 1. place on the first empty anti-diagonal cell (bottom-left first)
    for (int i = n - 1; i >= 0; --i) {
        int r = i, c = b.cols - 1 - i;
        if (b.at(r, c) != Cell::Empty) continue;
        if (auto t = pick([&](const GridBoard& nb) { return nb.at(r, c) == Cell::Human; })) return *t;
    }
    // 2. clear an own block that is off the diagonal
    for (int r = 0; r < b.rows; ++r)
        for (int c = 0; c < b.cols; ++c)
            if (b.at(r, c) == Cell::Human && !on_anti(r, c))
                if (auto t = pick([&](const GridBoard& nb) { return nb.at(r, c) == Cell::Empty; })) return *t;
    // 3. forced to move with the diagonal held: lift the top-right block
    for (int i = 0; i < n; ++i) {
        int r = i, c = b.cols - 1 - i;
        if (b.at(r, c) == Cell::Human)
            if (auto t = pick([&](const GridBoard& nb) { return nb.at(r, c) == Cell::Empty; })) return *t;
    }
    return succ.front();
}

} // namespace hrli
