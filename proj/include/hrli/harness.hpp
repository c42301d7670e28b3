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
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hrli/game.hpp"
#include "hrli/gridworld.hpp"
#include "hrli/kitchen.hpp"
#include "hrli/logic.hpp"
#include "hrli/runtime.hpp"
#include "hrli/templates.hpp"

namespace hrli {

// ---------------------------------------------------------------------------
// Domains

enum class DomainKind { Gridworld, Kitchen, File };

struct DomainSpec {
    DomainKind kind = DomainKind::Gridworld;
    GridworldConfig grid;
    KitchenConfig kitchen = KitchenConfig::desk();
    /// Domain document for DomainKind::File.
    std::string path;

    /// Inverse of parse_domain_spec.
    std::string describe() const;
};

/// Accepts "gridworld", "gridworld:<rows>x<cols>", "gridworld:<rows>x<cols>:<cap>",
/// "kitchen", "kitchen:desk" and "file:<path>". Throws ConfigError.
DomainSpec parse_domain_spec(std::string_view text);

struct LoadedDomain {
    DomainSpec spec;
    std::shared_ptr<const PlanningDomain> domain;
    /// Generator output, set only for the matching kind.
    std::shared_ptr<const Gridworld> grid;
    std::shared_ptr<const Kitchen> kitchen;
};

/// Builds or reads the domain. Throws ConfigError, CapacityError, IoError or ParseError.
LoadedDomain load_domain(const DomainSpec& spec);

/// Product game and synthesized templates for one robot task.
struct PreparedGame {
    LoadedDomain domain;
    TaskFormula task;
    std::shared_ptr<const ParityGame> game;
    TemplatePair templates;
    double build_seconds = 0.0;
    double product_seconds = 0.0;
    double synthesis_seconds = 0.0;
};

/// Throws the errors of load_domain, parse_task and synthesize_templates.
PreparedGame prepare_game(const DomainSpec& spec, const std::string& robot_task);
PreparedGame prepare_game(LoadedDomain domain, const std::string& robot_task);

// ---------------------------------------------------------------------------
// Simulated humans

enum class HumanKind { Probabilistic, Random, Diagonal, Obstructing };

struct HumanSpec {
    HumanKind kind = HumanKind::Probabilistic;
    ProbabilisticHuman::Params params;

    std::string describe() const;
};

/// Accepts "probabilistic" optionally followed by ":key=value,..." with keys
/// compliance, heed, patience and greedy, or one of "random", "diagonal",
/// "obstructor". Throws ConfigError.
HumanSpec parse_human_spec(std::string_view text);

/// The probabilistic human needs `human_task`; the diagonal builder needs a gridworld.
std::unique_ptr<HumanModel> make_human(const HumanSpec& spec, const LoadedDomain& domain,
                                       const std::string& human_task);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
    std::string scenario = "custom";
    DomainSpec domain;
    std::string robot_task;
    HumanSpec human;
    /// Task of the probabilistic human; may be empty for other models.
    std::string human_task;
    std::vector<double> alphas{0.05};
    std::size_t runs = 10;
    std::size_t max_moves = 500;
    /// Stop a run after this many goal events (0: never).
    std::size_t goal_events = 10;
    /// Propositional formulas. An empty `event` counts every entry into a
    /// robot-recipe state; empty recipes default to the single recurrence goal
    /// of the matching task.
    std::string event;
    std::string robot_recipe;
    std::string human_recipe;
    /// Optional propositional stop condition.
    std::string stop_when;
    std::uint64_t seed_base = 1000;
    std::size_t window = 0;
    RobotChoice robot_choice = RobotChoice::LiveGroups;
    std::uint32_t colive_budget = kDefaultColiveBudget;
    /// Wall-clock limit per run (0: none).
    double timeout_seconds = 120.0;
    /// Worker threads for the runs of one sweep.
    std::size_t threads = 1;

    /// Throws ConfigError for alphas outside [0, 1], runs == 0 or an empty task.
    void validate() const;
};

struct ScenarioPreset {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

/// identical, incompatible, compatible (cooking domain, alpha 0.00..0.10) and
/// adaptation (gridworld with the diagonal builder).
const std::vector<ScenarioPreset>& scenario_presets();
/// Throws LookupError naming the available presets.
ExperimentConfig scenario_preset(std::string_view name);

/// One run of a sweep.
///
/// The `*_pct` columns are shares of the run's goal events. The `*_run` columns
/// aggregate per run: a run counts as satisfying a recipe when at least half of
/// its goal events do (and it has at least one).
struct MetricsRow {
    std::string scenario;
    double alpha = 0.0;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::size_t events = 0;
    std::size_t robot_events = 0;
    std::size_t human_events = 0;
    std::size_t joint_events = 0;
    double robot_pct = 0.0;
    double human_pct = 0.0;
    double joint_pct = 0.0;
    bool robot_run = false;
    bool human_run = false;
    bool joint_run = false;
    std::size_t feedback_messages = 0;
    std::size_t human_turns = 0;
    /// Messages shown per human turn.
    double feedback_frequency = 0.0;
    std::size_t moves = 0;
    std::size_t resyntheses = 0;
    bool timed_out = false;
    std::string status;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// Builds the metrics row of a finished run.
MetricsRow metrics_from_run(const std::string& scenario, std::size_t run, const RunRecord& r);

/// Called once per finished run, serialized across worker threads.
using RunObserver = std::function<void(const MetricsRow&, const RunRecord&)>;

/// |alphas| x runs rows ordered by (alpha index, run). Seeds are seed_base + run.
/// Throws on invalid configurations and synthesis failures.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& c, const RunObserver& observer = {});
/// Same as above with a game prepared by the caller.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& c, const PreparedGame& prepared,
                                       const RunObserver& observer = {});

struct ScenarioFailure {
    std::string scenario;
    std::string message;
    /// Process exit code the failure maps to (2 config, 3 synthesis, 4 capacity).
    int exit_code = 1;
};

struct SweepResult {
    std::vector<MetricsRow> rows;
    std::vector<ScenarioFailure> failures;
};

/// Runs every configuration; a failing scenario is reported and the rest still run.
SweepResult run_experiments(const std::vector<ExperimentConfig>& configs, const RunObserver& observer = {});

struct SummaryStat {
    double mean = 0.0;
    /// Sample standard deviation (0 for fewer than two values).
    double stddev = 0.0;
};

/// Mean and spread of one (scenario, alpha) cell.
struct AggregateRow {
    std::string scenario;
    double alpha = 0.0;
    std::size_t runs = 0;
    SummaryStat robot_pct;
    SummaryStat human_pct;
    SummaryStat joint_pct;
    SummaryStat feedback_frequency;
    SummaryStat moves;
    /// Percentage of runs whose per-run flag is set.
    double robot_runs_pct = 0.0;
    double human_runs_pct = 0.0;
    double joint_runs_pct = 0.0;
};

SummaryStat summarize(const std::vector<double>& values);
/// Groups by (scenario, alpha) in order of first appearance.
std::vector<AggregateRow> aggregate_metrics(const std::vector<MetricsRow>& rows);

// ---------------------------------------------------------------------------
// Export

enum class MetricsFormat { Csv, JsonLines };

/// "csv", "jsonl" or "json-lines". Throws ConfigError.
MetricsFormat parse_metrics_format(std::string_view text);

/// Column names in output order.
const std::vector<std::string>& metrics_columns();

/// CSV always starts with the header line; numbers use the shortest text that
/// parses back to the same value.
std::string emit_metrics(const std::vector<MetricsRow>& rows, MetricsFormat format);
/// Throws ParseError (with the 1-based line number) on malformed input.
std::vector<MetricsRow> parse_metrics(std::string_view text, MetricsFormat format);

std::string emit_aggregates(const std::vector<AggregateRow>& rows, MetricsFormat format);

/// Writes `content` to `path`, replacing the file. Throws IoError.
void write_text_file(const std::string& path, std::string_view content);
/// Throws IoError.
std::string read_text_file(const std::string& path);

} // namespace hrli
