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

#include "hrli/domain.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "hrli/error.hpp"
#include "text_util.hpp"

namespace hrli {

const char* player_name(Player p) noexcept { return p == Player::Robot ? "robot" : "human"; }

std::optional<PropId> PlanningDomain::find_proposition(std::string_view name) const
{
    for (std::size_t i = 0; i < props_.size(); ++i)
        if (props_[i] == name) return static_cast<PropId>(i);
    return std::nullopt;
}

bool PlanningDomain::holds(StateId s, PropId p) const
{
    auto l = label(s);
    return std::binary_search(l.begin(), l.end(), p);
}

std::string PlanningDomain::name(StateId s) const
{
    return display_[s].empty() ? std::to_string(s) : display_[s];
}

std::optional<std::size_t> PlanningDomain::find_edge(StateId from, StateId to) const
{
    if (from >= num_states()) return std::nullopt;
    auto succ = out(from);
    auto it = std::lower_bound(succ.begin(), succ.end(), to);
    if (it == succ.end() || *it != to) return std::nullopt;
    return edge_off_[from] + static_cast<std::size_t>(it - succ.begin());
}

PropId DomainBuilder::add_proposition(std::string name)
{
    props_.push_back(std::move(name));
    return static_cast<PropId>(props_.size() - 1);
}

StateId DomainBuilder::add_state(Player owner, std::vector<PropId> label, std::string display)
{
    std::sort(label.begin(), label.end());
    label.erase(std::unique(label.begin(), label.end()), label.end());
    states_.push_back({owner, std::move(label), std::move(display)});
    return static_cast<StateId>(states_.size() - 1);
}

void DomainBuilder::add_edge(StateId from, StateId to, std::string action)
{
    if (from >= states_.size() || to >= states_.size())
        throw LookupError("edge (" + std::to_string(from) + "," + std::to_string(to) + ") references unknown state");
    edges_.push_back({from, to, std::move(action)});
}

PlanningDomain DomainBuilder::build() &&
{
    PlanningDomain d;
    d.props_ = std::move(props_);
    d.initial_ = initial_;
    const auto n = states_.size();
    d.owners_.reserve(n);
    d.display_.reserve(n);
    d.label_off_.reserve(n + 1);
    for (auto& st : states_) {
        d.owners_.push_back(st.owner);
        d.labels_.insert(d.labels_.end(), st.label.begin(), st.label.end());
        d.label_off_.push_back(static_cast<std::uint32_t>(d.labels_.size()));
        d.display_.push_back(std::move(st.display));
    }
    // stable sort keeps the first action text of duplicate edges in front
    std::stable_sort(edges_.begin(), edges_.end(), [](const PendingEdge& a, const PendingEdge& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    d.edge_off_.assign(n + 1, 0);
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto& e = edges_[k];
        if (k > 0 && edges_[k - 1].from == e.from && edges_[k - 1].to == e.to) continue;
        d.targets_.push_back(e.to);
        d.actions_.push_back(std::move(edges_[k].action));
        ++d.edge_off_[e.from + 1];
    }
    std::partial_sum(d.edge_off_.begin(), d.edge_off_.end(), d.edge_off_.begin());
    return d;
}

std::vector<StateId> successors(const PlanningDomain& d, StateId s)
{
    if (s >= d.num_states()) throw LookupError("unknown state id " + std::to_string(s));
    auto succ = d.out(s);
    return {succ.begin(), succ.end()};
}

std::vector<std::string> validate_domain(const PlanningDomain& d)
{
    std::vector<std::string> findings;
    if (d.num_states() == 0) {
        findings.emplace_back("domain has no states");
        return findings;
    }
    if (d.initial() >= d.num_states())
        findings.push_back("initial state " + std::to_string(d.initial()) + " is not a state");
    for (StateId s = 0; s < d.num_states(); ++s) {
        if (d.out(s).empty()) findings.push_back("state " + d.name(s) + " has no outgoing edge");
        for (StateId t : d.out(s))
            if (d.owner(s) == d.owner(t))
                findings.push_back("edge (" + d.name(s) + "," + d.name(t) + ") violates turn alternation");
        for (PropId p : d.label(s))
            if (p >= d.propositions().size())
                findings.push_back("state " + d.name(s) + " labeled with undeclared proposition " + std::to_string(p));
    }
    return findings;
}

// Document layout:
//
//   hrli-domain 1
//   propositions <name>*
//   initial <id>
//   states
//   <id> <R|H> {<name>,...} [display text]
//   edges
//   <source> <target> [action text]
std::string serialize_domain(const PlanningDomain& d)
{
    std::ostringstream os;
    os << "hrli-domain 1\n";
    os << "propositions";
    for (const auto& p : d.propositions()) os << ' ' << p;
    os << "\ninitial " << d.initial() << "\nstates\n";
    for (StateId s = 0; s < d.num_states(); ++s) {
        os << s << ' ' << player_code(d.owner(s)) << " {";
        bool first = true;
        for (PropId p : d.label(s)) {
            if (!first) os << ',';
            first = false;
            os << d.propositions()[p];
        }
        os << '}';
        if (!d.display(s).empty()) os << ' ' << d.display(s);
        os << '\n';
    }
    os << "edges\n";
    for (StateId s = 0; s < d.num_states(); ++s)
        for (std::size_t e = d.edge_begin(s); e < d.edge_end(s); ++e) {
            os << s << ' ' << d.edge_target(e);
            if (!d.edge_action(e).empty()) os << ' ' << d.edge_action(e);
            os << '\n';
        }
    return os.str();
}

PlanningDomain parse_domain(std::string_view text)
{
    using namespace detail;
    enum class Section { Header, States, Edges } section = Section::Header;
    DomainBuilder b;
    std::vector<std::string> props;
    std::optional<StateId> initial;
    bool saw_magic = false;
    struct EdgeLine {
        StateId from, to;
        std::string action;
        std::size_t line;
    };
    std::vector<EdgeLine> edges;

    auto lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        auto line = trim(lines[ln]);
        const auto lineno = ln + 1;
        auto fail = [&](const std::string& msg) -> ParseError {
            return ParseError("domain line " + std::to_string(lineno) + ": " + msg, 0, lineno);
        };
        if (line.empty() || line.front() == '#') continue;
        std::string_view rest;
        auto head = next_token(line, rest);
        if (!saw_magic) {
            if (head != "hrli-domain" || trim(rest) != "1") throw fail("expected 'hrli-domain 1'");
            saw_magic = true;
            continue;
        }
        if (head == "propositions" && section == Section::Header) {
            for (auto tok : split_ws(rest)) {
                if (!is_identifier(tok)) throw fail("invalid proposition name '" + std::string(tok) + "'");
                if (std::find(props.begin(), props.end(), tok) != props.end())
                    throw fail("duplicate proposition '" + std::string(tok) + "'");
                props.emplace_back(tok);
                b.add_proposition(std::string(tok));
            }
            continue;
        }
        if (head == "initial" && section == Section::Header) {
            auto v = parse_int<StateId>(trim(rest));
            if (!v) throw fail("invalid initial state id");
            initial = *v;
            continue;
        }
        if (head == "states" && section == Section::Header) {
            section = Section::States;
            continue;
        }
        if (head == "edges" && section == Section::States) {
            section = Section::Edges;
            continue;
        }
        if (section == Section::States) {
            auto id = parse_int<StateId>(head);
            if (!id || *id != b.num_states()) throw fail("state ids must be dense and ascending");
            auto owner_tok = next_token(rest, rest);
            Player owner;
            if (owner_tok == "R") owner = Player::Robot;
            else if (owner_tok == "H") owner = Player::Human;
            else throw fail("owner must be R or H");
            auto r = trim(rest);
            if (r.empty() || r.front() != '{') throw fail("expected label set");
            auto close = r.find('}');
            if (close == std::string_view::npos) throw fail("unterminated label set");
            std::vector<PropId> label;
            auto inner = r.substr(1, close - 1);
            std::size_t pos = 0;
            while (pos <= inner.size() && !trim(inner).empty()) {
                auto comma = inner.find(',', pos);
                auto name = trim(inner.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
                auto it = std::find(props.begin(), props.end(), name);
                if (it == props.end()) throw fail("unknown proposition '" + std::string(name) + "'");
                label.push_back(static_cast<PropId>(it - props.begin()));
                if (comma == std::string_view::npos) break;
                pos = comma + 1;
            }
            b.add_state(owner, std::move(label), std::string(trim(r.substr(close + 1))));
            continue;
        }
        if (section == Section::Edges) {
            auto from = parse_int<StateId>(head);
            auto to_tok = next_token(rest, rest);
            auto to = parse_int<StateId>(to_tok);
            if (!from || !to) throw fail("expected '<source> <target>'");
            edges.push_back({*from, *to, std::string(trim(rest)), lineno});
            continue;
        }
        throw fail("unexpected '" + std::string(head) + "'");
    }
    if (!saw_magic) throw ParseError("empty domain document", 0, 0);
    if (!initial) throw ParseError("domain document lacks 'initial'", 0, 0);
    for (auto& e : edges) {
        if (e.from >= b.num_states() || e.to >= b.num_states())
            throw ParseError("domain line " + std::to_string(e.line) + ": edge references unknown state", 0, e.line);
        b.add_edge(e.from, e.to, std::move(e.action));
    }
    b.set_initial(*initial);
    return std::move(b).build();
}

} // namespace hrli
