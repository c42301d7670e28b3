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

#include "hrli/domain.hpp"

namespace hrli {

/// Propositional formula over proposition ids.
struct PropFormula {
    enum class Kind : std::uint8_t { True, False, Atom, Not, And, Or };

    Kind kind = Kind::True;
    PropId atom = 0;
    std::vector<PropFormula> children;

    static PropFormula constant(bool value) { return {value ? Kind::True : Kind::False, 0, {}}; }
    static PropFormula prop(PropId p) { return {Kind::Atom, p, {}}; }
    static PropFormula negate(PropFormula f);
    static PropFormula conj(std::vector<PropFormula> fs);
    static PropFormula disj(std::vector<PropFormula> fs);

    /// Renders in the task grammar, parenthesizing every compound subterm.
    std::string to_string(const std::vector<std::string>& props) const;

    friend bool operator==(const PropFormula&, const PropFormula&) = default;
};

/// Label sets are sorted, duplicate-free spans of proposition ids.
using LabelView = std::span<const PropId>;

/// Atom p holds iff p is in `label`.
bool eval_prop(const PropFormula& f, LabelView label);

/// Conjunction of safety conjuncts (G psi) and recurrence conjuncts (G F phi).
struct TaskFormula {
    std::vector<PropFormula> safety;
    std::vector<PropFormula> recurrence;

    friend bool operator==(const TaskFormula&, const TaskFormula&) = default;
};

/// Parses `G psi` / `G F phi` conjuncts (see docs/formats.md for the grammar).
/// Throws ParseError for syntax errors and unknown propositions and
/// UnsupportedFragment for temporal shapes outside the fragment (naming the operator).
TaskFormula parse_task(std::string_view text, const std::vector<std::string>& ap);

/// Parses a purely propositional formula.
PropFormula parse_prop(std::string_view text, const std::vector<std::string>& ap);

std::string task_to_string(const TaskFormula& t, const std::vector<std::string>& ap);

/// Deterministic monitor over label sets with colors in {1, 2}.
///
/// Each state holds guarded transitions evaluated in order (first match wins)
/// and an optional fallback target used when no guard matches.
class ParityMonitor {
public:
    struct Transition {
        PropFormula guard;
        std::uint32_t target = 0;
        friend bool operator==(const Transition&, const Transition&) = default;
    };
    struct State {
        std::vector<Transition> transitions;
        std::optional<std::uint32_t> fallback;
        int color = 1;
        friend bool operator==(const State&, const State&) = default;
    };

    std::vector<std::string> propositions;
    std::vector<State> states;
    std::uint32_t initial = 0;

    std::size_t size() const noexcept { return states.size(); }
    int color(std::uint32_t q) const { return states[q].color; }
    /// Throws TotalityError when no transition applies.
    std::uint32_t step(std::uint32_t q, LabelView label) const;

    friend bool operator==(const ParityMonitor&, const ParityMonitor&) = default;
};

/// Round-robin monitor: waiting states 0..k-1 (color 1), an accepting state k
/// (color 2) entered whenever the last pending goal is met, and an absorbing
/// dead state (color 1) when safety conjuncts exist. Several goals may be
/// discharged by one label.
ParityMonitor compile_monitor(const TaskFormula& t, const std::vector<std::string>& ap);

/// Acceptance of the lasso trace `prefix · cycle^ω` (label sequence) by max-even parity.
bool monitor_accepts(const ParityMonitor& m, const std::vector<std::vector<PropId>>& prefix,
                     const std::vector<std::vector<PropId>>& cycle);

std::string export_monitor(const ParityMonitor& m);
/// Throws ParseError, TotalityError (missing transitions) or UnsupportedColor.
ParityMonitor import_monitor(std::string_view doc);

} // namespace hrli
