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

#include <functional>
#include <optional>
#include <vector>

#include "hrli/game.hpp"
#include "hrli/logic.hpp"
#include "hrli/templates.hpp"

// Brute-force reference implementations used to cross-check the library.
// Each one follows the textbook definition directly and shares no code with
// the implementation under test.
namespace hrli::testing {

/// v is included iff some color-2 vertex that lies on a cycle is reachable from v.
Region oracle_cooperative_buchi(const ParityGame& g);

/// Iterates the one-step attractor definition until nothing changes.
Region oracle_attractor(const ParityGame& g, const Region& target, AttractorMode mode);

/// Unrolls the lasso and evaluates the three constraint kinds on it.
bool oracle_complies(const ParityGame& g, const LassoRun& run, const StrategyTemplate& t);

/// Color 2 occurs on the cycle.
bool oracle_accepting(const ParityGame& g, const LassoRun& run);

/// Direct semantics of a task on the ultimately periodic word prefix · cycle^ω.
bool oracle_task_holds(const TaskFormula& t, const std::vector<std::vector<PropId>>& prefix,
                       const std::vector<std::vector<PropId>>& cycle);

/// Calls `visit` on every lasso whose walk (prefix plus one cycle pass) starts in
/// `starts`, has at most `max_len` edges, and follows `succ`.
void for_each_lasso(const ParityGame& g, const Region& starts, std::size_t max_len,
                    const std::function<void(VertexId, const std::function<void(VertexId)>&)>& succ,
                    const std::function<void(const LassoRun&)>& visit);

/// An accepting lasso from the winning region that breaks the human template, if
/// one of length at most `max_len` exists.
std::optional<LassoRun> oracle_permissiveness_counterexample(const ParityGame& g, const TemplatePair& p,
                                                             std::size_t max_len);

/// A positional robot strategy complying with the robot template together with a
/// human-compliant rejecting lasso of length at most `max_len`, if one exists.
std::optional<LassoRun> oracle_sufficiency_counterexample(const ParityGame& g, const TemplatePair& p,
                                                          std::size_t max_len);

/// Every robot vertex on the lasso leaves by a single successor.
bool oracle_positional(const ParityGame& g, const LassoRun& run);

} // namespace hrli::testing
