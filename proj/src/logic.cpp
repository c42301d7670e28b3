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

#include "hrli/logic.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

#include "hrli/error.hpp"
#include "text_util.hpp"

namespace hrli {

PropFormula PropFormula::negate(PropFormula f)
{
    if (f.kind == Kind::True) return constant(false);
    if (f.kind == Kind::False) return constant(true);
    PropFormula n{Kind::Not, 0, {}};
    n.children.push_back(std::move(f));
    return n;
}

PropFormula PropFormula::conj(std::vector<PropFormula> fs)
{
    if (fs.empty()) return constant(true);
    if (fs.size() == 1) return std::move(fs.front());
    return {Kind::And, 0, std::move(fs)};
}

PropFormula PropFormula::disj(std::vector<PropFormula> fs)
{
    if (fs.empty()) return constant(false);
    if (fs.size() == 1) return std::move(fs.front());
    return {Kind::Or, 0, std::move(fs)};
}

std::string PropFormula::to_string(const std::vector<std::string>& props) const
{
    switch (kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: return atom < props.size() ? props[atom] : "p" + std::to_string(atom);
    case Kind::Not: {
        const auto& c = children.front();
        auto inner = c.to_string(props);
        if (c.kind == Kind::And || c.kind == Kind::Or) return "!(" + inner + ")";
        return "!" + inner;
    }
    case Kind::And:
    case Kind::Or: {
        std::string out;
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) out += kind == Kind::And ? " & " : " | ";
            const auto& c = children[i];
            bool wrap = c.kind == Kind::And || c.kind == Kind::Or;
            out += wrap ? "(" + c.to_string(props) + ")" : c.to_string(props);
        }
        return out;
    }
    }
    return {};
}

bool eval_prop(const PropFormula& f, LabelView label)
{
    using K = PropFormula::Kind;
    switch (f.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: return std::binary_search(label.begin(), label.end(), f.atom);
    case K::Not: return !eval_prop(f.children.front(), label);
    case K::And:
        for (const auto& c : f.children)
            if (!eval_prop(c, label)) return false;
        return true;
    case K::Or:
        for (const auto& c : f.children)
            if (eval_prop(c, label)) return true;
        return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Ident, LParen, RParen, Not, And, Or, Implies, LBrace, RBrace, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        auto single = [&](Tok k, std::size_t len) {
            out.push_back({k, std::string(s.substr(i, len)), i});
            i += len;
        };
        if (c == '(') single(Tok::LParen, 1);
        else if (c == ')') single(Tok::RParen, 1);
        else if (c == '{') single(Tok::LBrace, 1);
        else if (c == '}') single(Tok::RBrace, 1);
        else if (c == ',') single(Tok::Comma, 1);
        else if (c == '!' || c == '~') single(Tok::Not, 1);
        else if (c == '&') single(Tok::And, i + 1 < s.size() && s[i + 1] == '&' ? 2 : 1);
        else if (c == '|') single(Tok::Or, i + 1 < s.size() && s[i + 1] == '|' ? 2 : 1);
        else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') single(Tok::Implies, 2);
        else if (c == '[' && i + 1 < s.size() && s[i + 1] == ']') {
            out.push_back({Tok::Ident, "G", i});
            i += 2;
        } else if (c == '<' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({Tok::Ident, "F", i});
            i += 2;
        } else if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            std::size_t j = i;
            while (j < s.size() && ((s[j] >= 'a' && s[j] <= 'z') || (s[j] >= 'A' && s[j] <= 'Z') ||
                                    (s[j] >= '0' && s[j] <= '9') || s[j] == '_'))
                ++j;
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i});
            i = j;
        } else {
            throw ParseError("unexpected character '" + std::string(1, c) + "' at position " + std::to_string(i), i);
        }
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

bool is_unary_temporal(const std::string& s) { return s == "G" || s == "F" || s == "X"; }
bool is_binary_temporal(const std::string& s) { return s == "U" || s == "R" || s == "W" || s == "M"; }

// General LTL syntax tree; only the fragment survives extraction.
struct Ltl {
    enum class Kind { True, False, Atom, Not, And, Or, Implies, Unary, Binary } kind;
    std::string op; // temporal operator name
    PropId atom = 0;
    std::size_t pos = 0;
    std::vector<Ltl> kids;
};

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& ap) : toks_(tokenize(text)), ap_(ap) {}

    Ltl parse_all()
    {
        Ltl f = implies();
        if (peek().kind != Tok::End) throw error("unexpected '" + peek().text + "'");
        return f;
    }

private:
    const Token& peek() const { return toks_[at_]; }
    Token take() { return toks_[at_++]; }
    ParseError error(const std::string& msg) const
    {
        return ParseError("syntax error at position " + std::to_string(peek().pos) + ": " + msg, peek().pos);
    }

    Ltl implies()
    {
        Ltl lhs = disjunction();
        if (peek().kind == Tok::Implies) {
            auto pos = take().pos;
            Ltl rhs = implies();
            return {Ltl::Kind::Implies, "->", 0, pos, {std::move(lhs), std::move(rhs)}};
        }
        return lhs;
    }
    Ltl disjunction()
    {
        Ltl f = conjunction();
        while (peek().kind == Tok::Or) {
            auto pos = take().pos;
            Ltl rhs = conjunction();
            f = {Ltl::Kind::Or, "|", 0, pos, {std::move(f), std::move(rhs)}};
        }
        return f;
    }
    Ltl conjunction()
    {
        Ltl f = binary();
        while (peek().kind == Tok::And) {
            auto pos = take().pos;
            Ltl rhs = binary();
            f = {Ltl::Kind::And, "&", 0, pos, {std::move(f), std::move(rhs)}};
        }
        return f;
    }
    Ltl binary()
    {
        Ltl lhs = unary();
        if (peek().kind == Tok::Ident && is_binary_temporal(peek().text)) {
            auto t = take();
            Ltl rhs = binary();
            return {Ltl::Kind::Binary, t.text, 0, t.pos, {std::move(lhs), std::move(rhs)}};
        }
        return lhs;
    }
    Ltl unary()
    {
        const auto& t = peek();
        if (t.kind == Tok::Not) {
            auto pos = take().pos;
            return {Ltl::Kind::Not, "!", 0, pos, {unary()}};
        }
        if (t.kind == Tok::Ident && is_unary_temporal(t.text)) {
            auto tok = take();
            return {Ltl::Kind::Unary, tok.text, 0, tok.pos, {unary()}};
        }
        return primary();
    }
    Ltl primary()
    {
        const auto t = peek();
        if (t.kind == Tok::LParen) {
            take();
            Ltl f = implies();
            if (peek().kind != Tok::RParen) throw error("expected ')'");
            take();
            return f;
        }
        if (t.kind == Tok::Ident) {
            take();
            if (t.text == "true") return {Ltl::Kind::True, "", 0, t.pos, {}};
            if (t.text == "false") return {Ltl::Kind::False, "", 0, t.pos, {}};
            if (is_binary_temporal(t.text)) throw error("operator '" + t.text + "' lacks a left operand");
            auto it = std::find(ap_.begin(), ap_.end(), t.text);
            if (it == ap_.end())
                throw ParseError("unknown proposition '" + t.text + "' at position " + std::to_string(t.pos), t.pos);
            return {Ltl::Kind::Atom, "", static_cast<PropId>(it - ap_.begin()), t.pos, {}};
        }
        if (t.kind == Tok::End) throw error("unexpected end of formula");
        throw error("unexpected '" + t.text + "'");
    }

    std::vector<Token> toks_;
    std::size_t at_ = 0;
    const std::vector<std::string>& ap_;
};

// First temporal operator inside `f`, if any.
const Ltl* find_temporal(const Ltl& f)
{
    if (f.kind == Ltl::Kind::Unary || f.kind == Ltl::Kind::Binary) return &f;
    for (const auto& k : f.kids)
        if (auto t = find_temporal(k)) return t;
    return nullptr;
}

PropFormula to_prop(const Ltl& f)
{
    switch (f.kind) {
    case Ltl::Kind::True: return PropFormula::constant(true);
    case Ltl::Kind::False: return PropFormula::constant(false);
    case Ltl::Kind::Atom: return PropFormula::prop(f.atom);
    case Ltl::Kind::Not: return PropFormula::negate(to_prop(f.kids[0]));
    case Ltl::Kind::And: {
        std::vector<PropFormula> parts;
        for (const auto& k : f.kids) {
            auto p = to_prop(k);
            if (p.kind == PropFormula::Kind::And)
                for (auto& c : p.children) parts.push_back(std::move(c));
            else
                parts.push_back(std::move(p));
        }
        return PropFormula::conj(std::move(parts));
    }
    case Ltl::Kind::Or: {
        std::vector<PropFormula> parts;
        for (const auto& k : f.kids) {
            auto p = to_prop(k);
            if (p.kind == PropFormula::Kind::Or)
                for (auto& c : p.children) parts.push_back(std::move(c));
            else
                parts.push_back(std::move(p));
        }
        return PropFormula::disj(std::move(parts));
    }
    case Ltl::Kind::Implies: return PropFormula::disj({PropFormula::negate(to_prop(f.kids[0])), to_prop(f.kids[1])});
    default: break;
    }
    throw UnsupportedFragment(f.op, "inside a propositional formula");
}

void require_propositional(const Ltl& f, const char* where)
{
    if (auto t = find_temporal(f))
        throw UnsupportedFragment(t->op, std::string("at position ") + std::to_string(t->pos) + " " + where);
}

void extract(const Ltl& f, TaskFormula& out)
{
    switch (f.kind) {
    case Ltl::Kind::And:
        for (const auto& k : f.kids) extract(k, out);
        return;
    case Ltl::Kind::Unary:
        if (f.op == "G") {
            const Ltl& body = f.kids[0];
            if (body.kind == Ltl::Kind::Unary && body.op == "F") {
                require_propositional(body.kids[0], "under G F");
                out.recurrence.push_back(to_prop(body.kids[0]));
                return;
            }
            if (body.kind == Ltl::Kind::Unary && body.op == "G") {
                extract(body, out);
                return;
            }
            require_propositional(body, "under G (only G psi and G F phi conjuncts are supported)");
            out.safety.push_back(to_prop(body));
            return;
        }
        throw UnsupportedFragment(f.op, "at position " + std::to_string(f.pos) +
                                            " (only G psi and G F phi conjuncts are supported)");
    case Ltl::Kind::Binary:
        throw UnsupportedFragment(f.op, "at position " + std::to_string(f.pos) + " (until-style operators are not supported)");
    default:
        if (auto t = find_temporal(f))
            throw UnsupportedFragment(t->op, "at position " + std::to_string(t->pos) +
                                                 " (temporal operators may only be combined by top-level conjunction)");
        throw UnsupportedFragment("bare proposition", "at position " + std::to_string(f.pos) +
                                                          " (constraints on the initial state only are not supported)");
    }
}

} // namespace

TaskFormula parse_task(std::string_view text, const std::vector<std::string>& ap)
{
    Parser p(text, ap);
    Ltl f = p.parse_all();
    TaskFormula t;
    extract(f, t);
    if (t.recurrence.empty() && t.safety.empty()) throw ParseError("empty task", 0);
    return t;
}

PropFormula parse_prop(std::string_view text, const std::vector<std::string>& ap)
{
    Parser p(text, ap);
    Ltl f = p.parse_all();
    require_propositional(f, "in a propositional formula");
    return to_prop(f);
}

std::string task_to_string(const TaskFormula& t, const std::vector<std::string>& ap)
{
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += " & ";
        out += s;
    };
    for (const auto& s : t.safety) add("G (" + s.to_string(ap) + ")");
    for (const auto& r : t.recurrence) add("G F (" + r.to_string(ap) + ")");
    return out;
}

// ---------------------------------------------------------------------------
// Monitors

std::uint32_t ParityMonitor::step(std::uint32_t q, LabelView label) const
{
    const auto& st = states.at(q);
    for (const auto& tr : st.transitions)
        if (eval_prop(tr.guard, label)) return tr.target;
    if (st.fallback) return *st.fallback;
    throw TotalityError("monitor state " + std::to_string(q) + " has no transition for the given label");
}

ParityMonitor compile_monitor(const TaskFormula& t, const std::vector<std::string>& ap)
{
    ParityMonitor m;
    m.propositions = ap;
    const auto k = static_cast<std::uint32_t>(t.recurrence.size());
    const bool has_safety = !t.safety.empty();
    const std::uint32_t accept = k;
    const std::uint32_t dead = k + 1;
    m.states.resize(has_safety ? k + 2 : k + 1);
    m.initial = 0;
    for (std::uint32_t q = 0; q <= k; ++q) {
        auto& st = m.states[q];
        st.color = q == accept ? 2 : 1;
        const std::uint32_t first = q == accept ? 0 : q;
        if (has_safety) st.transitions.push_back({PropFormula::negate(PropFormula::conj(t.safety)), dead});
        // longest chain of consecutively met goals first
        for (std::uint32_t j = k; j > first; --j) {
            std::vector<PropFormula> chain(t.recurrence.begin() + first, t.recurrence.begin() + j);
            st.transitions.push_back({PropFormula::conj(std::move(chain)), j});
        }
        st.fallback = first == k ? accept : first;
    }
    if (has_safety) {
        m.states[dead].color = 1;
        m.states[dead].fallback = dead;
    }
    return m;
}

bool monitor_accepts(const ParityMonitor& m, const std::vector<std::vector<PropId>>& prefix,
                     const std::vector<std::vector<PropId>>& cycle)
{
    if (cycle.empty()) throw ConfigError("lasso cycle must be non-empty");
    std::uint32_t q = m.initial;
    for (const auto& l : prefix) q = m.step(q, l);
    // iterate the cycle until the state at the cycle start repeats
    std::map<std::uint32_t, std::size_t> seen;
    std::vector<int> colors;
    std::vector<std::size_t> lap_start;
    while (!seen.count(q)) {
        seen[q] = lap_start.size();
        lap_start.push_back(colors.size());
        for (const auto& l : cycle) {
            q = m.step(q, l);
            colors.push_back(m.color(q));
        }
    }
    auto from = lap_start[seen[q]];
    int max_color = *std::max_element(colors.begin() + static_cast<std::ptrdiff_t>(from), colors.end());
    return max_color % 2 == 0;
}

// Document layout:
//
//   hrli-monitor 1
//   propositions <name>*
//   initial <q>
//   state <q> color <1|2>
//     on <guard> -> <target>
//     default -> <target>
//
// Guards are propositional formulas in the task grammar or exact label sets `{a,b}`.
std::string export_monitor(const ParityMonitor& m)
{
    std::ostringstream os;
    os << "hrli-monitor 1\npropositions";
    for (const auto& p : m.propositions) os << ' ' << p;
    os << "\ninitial " << m.initial << '\n';
    for (std::size_t q = 0; q < m.states.size(); ++q) {
        const auto& st = m.states[q];
        os << "state " << q << " color " << st.color << '\n';
        for (const auto& tr : st.transitions) os << "  on " << tr.guard.to_string(m.propositions) << " -> " << tr.target << '\n';
        if (st.fallback) os << "  default -> " << *st.fallback << '\n';
    }
    return os.str();
}

ParityMonitor import_monitor(std::string_view doc)
{
    using namespace detail;
    ParityMonitor m;
    bool magic = false, have_initial = false;
    std::optional<std::uint32_t> current;
    std::vector<std::size_t> state_lines;
    auto lines = split_lines(doc);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        auto line = trim(lines[ln]);
        const auto lineno = ln + 1;
        auto fail = [&](const std::string& msg) {
            return ParseError("monitor line " + std::to_string(lineno) + ": " + msg, 0, lineno);
        };
        if (line.empty() || line.front() == '#') continue;
        std::string_view rest;
        auto head = next_token(line, rest);
        if (!magic) {
            if (head != "hrli-monitor" || trim(rest) != "1") throw fail("expected 'hrli-monitor 1'");
            magic = true;
            continue;
        }
        if (head == "propositions") {
            for (auto tok : split_ws(rest)) {
                if (!is_identifier(tok)) throw fail("invalid proposition name");
                m.propositions.emplace_back(tok);
            }
        } else if (head == "initial") {
            auto v = parse_int<std::uint32_t>(trim(rest));
            if (!v) throw fail("invalid initial state");
            m.initial = *v;
            have_initial = true;
        } else if (head == "state") {
            auto toks = split_ws(rest);
            if (toks.size() != 3 || toks[1] != "color") throw fail("expected 'state <q> color <c>'");
            auto q = parse_int<std::uint32_t>(toks[0]);
            auto c = parse_int<int>(toks[2]);
            if (!q || *q != m.states.size()) throw fail("state ids must be dense and ascending");
            if (!c) throw fail("invalid color");
            if (*c != 1 && *c != 2)
                throw UnsupportedColor("monitor state " + std::to_string(*q) + " has color " + std::to_string(*c) +
                                       "; only colors 1 and 2 are supported");
            m.states.push_back({{}, std::nullopt, *c});
            state_lines.push_back(lineno);
            current = *q;
        } else if (head == "on" || head == "default") {
            if (!current) throw fail("transition outside a state block");
            auto arrow = rest.rfind("->");
            if (arrow == std::string_view::npos) throw fail("expected '-> <target>'");
            auto target = parse_int<std::uint32_t>(trim(rest.substr(arrow + 2)));
            if (!target) throw fail("invalid target");
            auto guard_text = trim(rest.substr(0, arrow));
            auto& st = m.states[*current];
            if (head == "default") {
                if (!guard_text.empty()) throw fail("default takes no guard");
                st.fallback = *target;
                continue;
            }
            PropFormula guard;
            if (!guard_text.empty() && guard_text.front() == '{') {
                if (guard_text.back() != '}') throw fail("unterminated label set");
                std::vector<PropFormula> parts(m.propositions.size());
                std::vector<bool> in(m.propositions.size(), false);
                auto inner = guard_text.substr(1, guard_text.size() - 2);
                std::size_t pos = 0;
                while (!trim(inner).empty()) {
                    auto comma = inner.find(',', pos);
                    auto name = trim(inner.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
                    auto it = std::find(m.propositions.begin(), m.propositions.end(), name);
                    if (it == m.propositions.end()) throw fail("unknown proposition '" + std::string(name) + "'");
                    in[static_cast<std::size_t>(it - m.propositions.begin())] = true;
                    if (comma == std::string_view::npos) break;
                    pos = comma + 1;
                }
                for (std::size_t p = 0; p < in.size(); ++p) {
                    auto atom = PropFormula::prop(static_cast<PropId>(p));
                    parts[p] = in[p] ? atom : PropFormula::negate(atom);
                }
                guard = PropFormula::conj(std::move(parts));
            } else {
                try {
                    guard = parse_prop(guard_text, m.propositions);
                } catch (const ParseError& e) {
                    throw fail(e.what());
                }
            }
            st.transitions.push_back({std::move(guard), *target});
        } else {
            throw fail("unexpected '" + std::string(head) + "'");
        }
    }
    if (!magic) throw ParseError("empty monitor document", 0, 0);
    if (m.states.empty()) throw ParseError("monitor has no states", 0, 0);
    if (!have_initial || m.initial >= m.states.size()) throw ParseError("monitor initial state missing or unknown", 0, 0);

    for (std::size_t q = 0; q < m.states.size(); ++q) {
        const auto& st = m.states[q];
        for (const auto& tr : st.transitions)
            if (tr.target >= m.states.size())
                throw ParseError("monitor state " + std::to_string(q) + " targets unknown state", 0, state_lines[q]);
        if (st.fallback) {
            if (*st.fallback >= m.states.size())
                throw ParseError("monitor state " + std::to_string(q) + " defaults to unknown state", 0, state_lines[q]);
            continue;
        }
        // no default: every valuation must be matched
        const auto n = m.propositions.size();
        if (n > 16)
            throw TotalityError("monitor state " + std::to_string(q) + " has no default transition");
        std::vector<PropId> label;
        for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
            label.clear();
            for (std::size_t p = 0; p < n; ++p)
                if (bits >> p & 1u) label.push_back(static_cast<PropId>(p));
            bool matched = std::any_of(st.transitions.begin(), st.transitions.end(),
                                       [&](const auto& tr) { return eval_prop(tr.guard, label); });
            if (!matched)
                throw TotalityError("monitor state " + std::to_string(q) + " has no transition for some label set");
        }
    }
    return m;
}

} // namespace hrli
