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

#include "hrli/kitchen.hpp"

#include <array>
#include <deque>
#include <unordered_map>

#include "hrli/error.hpp"

namespace hrli {

KitchenConfig KitchenConfig::desk()
{
    KitchenConfig c;
    c.layout = {
        "XXXXXXX",
        "O..X..S",
        "O..P..S",
        "XH...RX",
        "XXXXXXX",
    };
    return c;
}

namespace {

constexpr std::array<std::pair<int, int>, 4> kDirs{{{-1, 0}, {1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<const char*, 4> kDirNames{"north", "south", "east", "west"};

bool is_floor(char ch) { return ch == '.' || ch == 'H' || ch == 'R'; }

std::uint64_t state_key(const KitchenState& s)
{
    std::uint64_t k = s.human_cell;
    k = k * 256 + s.robot_cell;
    k = k * 4 + static_cast<std::uint64_t>(s.human);
    k = k * 4 + static_cast<std::uint64_t>(s.robot);
    k = k * 256 + s.pot;
    k = k * 256 + s.delivered;
    k = k * 2 + (s.to_move == Player::Human ? 1 : 0);
    return k;
}

char holding_code(Holding h) { return h == Holding::Nothing ? '-' : h == Holding::Onion ? 'o' : 's'; }

struct Layout {
    int rows = 0, cols = 0;
    std::vector<std::pair<int, int>> floor;
    std::vector<int> floor_index; // per grid cell, -1 if not floor
    int human_start = -1, robot_start = -1;
    int pots = 0;

    char at(const KitchenConfig& c, int r, int col) const
    {
        if (r < 0 || col < 0 || r >= rows || col >= cols) return 'X';
        return c.layout[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
    }
};

Layout read_layout(const KitchenConfig& c)
{
    Layout l;
    l.rows = static_cast<int>(c.layout.size());
    if (l.rows == 0) throw ConfigError("kitchen layout is empty");
    l.cols = static_cast<int>(c.layout.front().size());
    l.floor_index.assign(static_cast<std::size_t>(l.rows * l.cols), -1);
    for (int r = 0; r < l.rows; ++r) {
        if (static_cast<int>(c.layout[static_cast<std::size_t>(r)].size()) != l.cols)
            throw ConfigError("kitchen layout rows differ in length");
        for (int col = 0; col < l.cols; ++col) {
            char ch = l.at(c, r, col);
            switch (ch) {
            case 'X': case 'O': case 'S': break;
            case 'P': ++l.pots; break;
            case '.': case 'H': case 'R': {
                int idx = static_cast<int>(l.floor.size());
                l.floor_index[static_cast<std::size_t>(r * l.cols + col)] = idx;
                l.floor.emplace_back(r, col);
                if (ch == 'H') {
                    if (l.human_start >= 0) throw ConfigError("kitchen layout has more than one human start");
                    l.human_start = idx;
                }
                if (ch == 'R') {
                    if (l.robot_start >= 0) throw ConfigError("kitchen layout has more than one robot start");
                    l.robot_start = idx;
                }
                break;
            }
            default: throw ConfigError(std::string("unknown kitchen tile '") + ch + "'");
            }
        }
    }
    if (l.pots != 1) throw ConfigError("kitchen layout needs exactly one pot");
    if (l.human_start < 0 || l.robot_start < 0) throw ConfigError("kitchen layout needs H and R start cells");
    if (l.floor.size() > 255) throw ConfigError("kitchen layout has too many floor cells");
    if (c.pot_capacity < 1 || c.pot_capacity > 9) throw ConfigError("pot capacity must be in 1..9");
    return l;
}

bool adjacent_to(const KitchenConfig& c, const Layout& l, int cell, char station)
{
    auto [r, col] = l.floor[static_cast<std::size_t>(cell)];
    for (auto [dr, dc] : kDirs)
        if (l.at(c, r + dr, col + dc) == station) return true;
    return false;
}

void check_reachability(const KitchenConfig& c, const Layout& l)
{
    for (int start : {l.human_start, l.robot_start}) {
        std::vector<bool> seen(l.floor.size(), false);
        std::deque<int> q{start};
        seen[static_cast<std::size_t>(start)] = true;
        bool pot = false, window = false, onion = false;
        while (!q.empty()) {
            int cell = q.front();
            q.pop_front();
            pot |= adjacent_to(c, l, cell, 'P');
            window |= adjacent_to(c, l, cell, 'S');
            onion |= adjacent_to(c, l, cell, 'O');
            auto [r, col] = l.floor[static_cast<std::size_t>(cell)];
            for (auto [dr, dc] : kDirs) {
                int rr = r + dr, cc = col + dc;
                if (rr < 0 || cc < 0 || rr >= l.rows || cc >= l.cols) continue;
                int nb = l.floor_index[static_cast<std::size_t>(rr * l.cols + cc)];
                if (nb >= 0 && !seen[static_cast<std::size_t>(nb)]) {
                    seen[static_cast<std::size_t>(nb)] = true;
                    q.push_back(nb);
                }
            }
        }
        if (!pot || !window || !onion)
            throw ConfigError(std::string("kitchen layout: ") + (!pot ? "pot" : !window ? "serving window" : "onion dispenser") +
                              " unreachable from a start cell");
    }
}

} // namespace

Kitchen build_kitchen(const KitchenConfig& config)
{
    const Layout l = read_layout(config);
    check_reachability(config, l);
    const int cap = config.pot_capacity;

    Kitchen k;
    k.config = config;
    k.floor = l.floor;

    DomainBuilder b;
    const PropId delivered0 = b.add_proposition("delivered_onions_0");
    for (int i = 1; i <= cap; ++i) b.add_proposition("delivered_onions_" + std::to_string(i));
    const PropId pot0 = b.add_proposition("pot_count_0");
    for (int i = 1; i <= cap; ++i) b.add_proposition("pot_count_" + std::to_string(i));
    const PropId human_onion = b.add_proposition("human_onion");
    const PropId human_soup = b.add_proposition("human_soup");
    const PropId robot_onion = b.add_proposition("robot_onion");
    const PropId robot_soup = b.add_proposition("robot_soup");
    const PropId human_turn = b.add_proposition("human_turn");
    auto cell_suffix = [&](int cell) {
        auto [r, c] = l.floor[static_cast<std::size_t>(cell)];
        return std::to_string(r + 1) + "_" + std::to_string(c + 1);
    };
    const PropId human_at0 = static_cast<PropId>(human_turn + 1);
    for (std::size_t i = 0; i < l.floor.size(); ++i) b.add_proposition("human_at_" + cell_suffix(static_cast<int>(i)));
    const PropId robot_at0 = static_cast<PropId>(human_at0 + l.floor.size());
    for (std::size_t i = 0; i < l.floor.size(); ++i) b.add_proposition("robot_at_" + cell_suffix(static_cast<int>(i)));

    auto label_of = [&](const KitchenState& s) {
        std::vector<PropId> label{static_cast<PropId>(delivered0 + s.delivered), static_cast<PropId>(pot0 + s.pot)};
        if (s.human == Holding::Onion) label.push_back(human_onion);
        if (s.human == Holding::Soup) label.push_back(human_soup);
        if (s.robot == Holding::Onion) label.push_back(robot_onion);
        if (s.robot == Holding::Soup) label.push_back(robot_soup);
        if (s.to_move == Player::Human) label.push_back(human_turn);
        label.push_back(static_cast<PropId>(human_at0 + s.human_cell));
        label.push_back(static_cast<PropId>(robot_at0 + s.robot_cell));
        return label;
    };
    auto display_of = [&](const KitchenState& s) {
        auto pos = [&](int cell) {
            auto [r, c] = l.floor[static_cast<std::size_t>(cell)];
            return "(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")";
        };
        std::string out;
        out += player_code(s.to_move);
        out += "| H" + pos(s.human_cell) + holding_code(s.human) + " R" + pos(s.robot_cell) + holding_code(s.robot) +
               " pot" + std::to_string(s.pot);
        if (s.delivered) out += " served" + std::to_string(s.delivered);
        return out;
    };

    std::unordered_map<std::uint64_t, StateId> index;
    std::deque<StateId> queue;
    auto intern = [&](const KitchenState& s) {
        auto [it, fresh] = index.try_emplace(state_key(s), static_cast<StateId>(k.states.size()));
        if (fresh) {
            if (k.states.size() >= config.state_cap) throw CapacityError("kitchen state cap exceeded", config.state_cap);
            k.states.push_back(s);
            b.add_state(s.to_move, label_of(s), display_of(s));
            queue.push_back(it->second);
        }
        return it->second;
    };

    KitchenState start;
    start.human_cell = static_cast<std::uint8_t>(l.human_start);
    start.robot_cell = static_cast<std::uint8_t>(l.robot_start);
    start.to_move = config.first;
    b.set_initial(intern(start));

    while (!queue.empty()) {
        const StateId id = queue.front();
        queue.pop_front();
        const KitchenState s = k.states[id];
        const bool human = s.to_move == Player::Human;
        const int me = human ? s.human_cell : s.robot_cell;
        const int other = human ? s.robot_cell : s.human_cell;
        const Holding hold = human ? s.human : s.robot;
        const bool soup_out = s.human == Holding::Soup || s.robot == Holding::Soup;

        auto emit = [&](KitchenState next, int cell, Holding h, std::string action) {
            next.to_move = opponent(s.to_move);
            (human ? next.human_cell : next.robot_cell) = static_cast<std::uint8_t>(cell);
            (human ? next.human : next.robot) = h;
            b.add_edge(id, intern(next), std::move(action));
        };
        KitchenState base = s;
        base.delivered = 0;

        emit(base, me, hold, "wait");
        auto [r, c] = l.floor[static_cast<std::size_t>(me)];
        for (std::size_t d = 0; d < kDirs.size(); ++d) {
            int rr = r + kDirs[d].first, cc = c + kDirs[d].second;
            char ch = l.at(config, rr, cc);
            if (is_floor(ch)) {
                int nb = l.floor_index[static_cast<std::size_t>(rr * l.cols + cc)];
                if (nb != other) emit(base, nb, hold, std::string("move ") + kDirNames[d]);
                continue;
            }
            switch (ch) {
            case 'O':
                if (hold == Holding::Nothing) emit(base, me, Holding::Onion, "take onion");
                if (hold == Holding::Onion) emit(base, me, Holding::Nothing, "return onion");
                break;
            case 'P':
                if (hold == Holding::Onion && s.pot < cap && !soup_out) {
                    KitchenState next = base;
                    ++next.pot;
                    emit(next, me, Holding::Nothing, "add onion to pot");
                } else if (hold == Holding::Nothing && s.pot >= 1 && !soup_out) {
                    emit(base, me, Holding::Soup, "pick up soup");
                }
                break;
            case 'S':
                if (hold == Holding::Soup) {
                    KitchenState next = base;
                    next.delivered = s.pot;
                    next.pot = 0;
                    emit(next, me, Holding::Nothing, "deliver soup");
                }
                break;
            default: break;
            }
        }
    }
    k.domain = std::move(b).build();
    return k;
}

} // namespace hrli
