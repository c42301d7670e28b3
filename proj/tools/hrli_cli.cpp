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

// Command-line front end: synth, simulate, experiment and serve.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hrli/harness.hpp"
#include "hrli/service.hpp"

namespace {

using namespace hrli;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSynthesis = 3;
constexpr int kExitCapacity = 4;

/// Options shared by the subcommands that build a domain.
struct DomainOptions {
    std::string domain = "gridworld";
    std::size_t state_cap = 0;

    DomainSpec spec() const
    {
        auto s = parse_domain_spec(domain);
        if (state_cap > 0) {
            s.grid.state_cap = state_cap;
            s.kitchen.state_cap = state_cap;
        }
        return s;
    }
};

void add_domain_options(CLI::App* cmd, DomainOptions& o)
{
    cmd->add_option("--domain", o.domain, "gridworld[:RxC[:cap]], kitchen[:desk] or file:<path>");
    cmd->add_option("--state-cap", o.state_cap, "Abort when the domain exceeds this many states");
}

std::vector<double> parse_alpha_list(const std::vector<std::string>& items)
{
    std::vector<double> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw ConfigError("bad alpha '" + tok + "'");
            out.push_back(v);
        }
    }
    return out;
}

void emit(const std::string& out_path, const std::string& text)
{
    if (out_path.empty() || out_path == "-") std::cout << text << std::flush;
    else write_text_file(out_path, text);
}

int run_synth(const DomainOptions& d, const std::string& task, const std::string& out_path)
{
    if (task.empty()) throw ConfigError("--task is required");
    const auto p = prepare_game(d.spec(), task);
    std::size_t robot_live = 0;
    for (const auto& g : p.templates.robot.live_groups) robot_live += g.size();
    std::size_t human_live = 0;
    for (const auto& g : p.templates.human.live_groups) human_live += g.size();
    nlohmann::ordered_json report{
        {"domain", p.domain.spec.describe()},
        {"task", task_to_string(p.task, p.domain.domain->propositions())},
        {"states", p.domain.domain->num_states()},
        {"propositions", p.domain.domain->propositions().size()},
        {"vertices", p.game->num_vertices()},
        {"edges", p.game->num_edges()},
        {"winning", p.templates.winning.count()},
        {"robot", {{"live_groups", p.templates.robot.live_groups.size()}, {"live_edges", robot_live},
                   {"unsafe", p.templates.robot.unsafe.size()}, {"colive", p.templates.robot.colive.size()}}},
        {"human", {{"live_groups", p.templates.human.live_groups.size()}, {"live_edges", human_live},
                   {"unsafe", p.templates.human.unsafe.size()}, {"colive", p.templates.human.colive.size()}}},
        {"seconds", {{"domain", p.build_seconds}, {"product", p.product_seconds}, {"synthesis", p.synthesis_seconds},
                     {"total", p.build_seconds + p.product_seconds + p.synthesis_seconds}}}};
    if (!out_path.empty()) write_text_file(out_path, export_templates(p.templates));
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

/// Experiment configuration from a preset name, overridden by explicit flags.
struct RunOptions {
    std::string scenario;
    DomainOptions domain;
    std::string task;
    std::string human_task;
    std::string human_model;
    std::vector<std::string> alphas;
    std::size_t runs = 0;
    std::size_t max_moves = 0;
    bool max_moves_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t goal_events = 0;
    bool goal_events_set = false;
    std::string event;
    std::string stop_when;
    std::size_t window = 0;
    std::string robot_choice;
    double timeout = -1.0;
    std::size_t threads = 1;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool sweep)
{
    cmd->add_option("--scenario", o.scenario, "Preset: identical, incompatible, compatible, adaptation");
    add_domain_options(cmd, o.domain);
    cmd->add_option("--task", o.task, "Robot task, e.g. \"G F (adj & major)\"");
    cmd->add_option("--human-task", o.human_task, "Task of the probabilistic human");
    cmd->add_option("--human-model", o.human_model,
                    "probabilistic[:compliance=..,heed=..,patience=..,greedy=0|1], random, diagonal, obstructor");
    cmd->add_option("--alpha", o.alphas, sweep ? "Feedback thresholds (comma separated or repeated)" : "Feedback threshold");
    if (sweep) cmd->add_option("--runs", o.runs, "Runs per threshold");
    cmd->add_option("--max-moves", o.max_moves, "Move cap per run")->each([&o](const std::string&) { o.max_moves_set = true; });
    cmd->add_option("--seed", o.seed, sweep ? "Seed base (run i uses base + i)" : "Seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--goal-events", o.goal_events, "Stop after this many goal events (0: never)")
        ->each([&o](const std::string&) { o.goal_events_set = true; });
    cmd->add_option("--event", o.event, "Propositional goal-event condition");
    cmd->add_option("--stop-when", o.stop_when, "Propositional stop condition");
    cmd->add_option("--window", o.window, "Sliding window of opportunities (0: cumulative)");
    cmd->add_option("--robot-choice", o.robot_choice, "live-groups or all-edges");
    cmd->add_option("--timeout", o.timeout, "Wall-clock limit per run in seconds (0: none)");
    if (sweep) cmd->add_option("--threads", o.threads, "Worker threads");
}

ExperimentConfig build_config(const RunOptions& o)
{
    ExperimentConfig c;
    if (!o.scenario.empty()) {
        try {
            c = scenario_preset(o.scenario);
        } catch (const LookupError& e) {
            throw ConfigError(e.what());
        }
    } else {
        c.scenario = "custom";
        c.domain = o.domain.spec();
        c.goal_events = 0;
        if (o.task.empty()) throw ConfigError("either --scenario or --task is required");
    }
    if (!o.scenario.empty() && o.domain.state_cap > 0) {
        c.domain.grid.state_cap = o.domain.state_cap;
        c.domain.kitchen.state_cap = o.domain.state_cap;
    }
    if (!o.task.empty()) c.robot_task = o.task;
    if (!o.human_task.empty()) c.human_task = o.human_task;
    if (!o.human_model.empty()) c.human = parse_human_spec(o.human_model);
    if (!o.alphas.empty()) c.alphas = parse_alpha_list(o.alphas);
    if (o.runs > 0) c.runs = o.runs;
    if (o.max_moves_set) c.max_moves = o.max_moves;
    if (o.seed_set) c.seed_base = o.seed;
    if (o.goal_events_set) c.goal_events = o.goal_events;
    if (!o.event.empty()) c.event = o.event;
    if (!o.stop_when.empty()) c.stop_when = o.stop_when;
    c.window = o.window;
    if (o.robot_choice == "all-edges") c.robot_choice = RobotChoice::AllEdges;
    else if (o.robot_choice == "live-groups") c.robot_choice = RobotChoice::LiveGroups;
    else if (!o.robot_choice.empty()) throw ConfigError("--robot-choice must be live-groups or all-edges");
    if (o.timeout >= 0.0) c.timeout_seconds = o.timeout;
    c.threads = o.threads;
    if (c.human.kind == HumanKind::Probabilistic && c.human_task.empty())
        throw ConfigError("the probabilistic human needs --human-task");
    c.validate();
    return c;
}

int run_simulate(const RunOptions& o, const std::string& out_path)
{
    auto c = build_config(o);
    if (c.alphas.size() != 1) throw ConfigError("simulate takes a single --alpha");
    c.runs = 1;
    std::string log;
    run_experiment(c, [&](const MetricsRow&, const RunRecord& r) { log = run_record_to_jsonl(r); });
    emit(out_path, log);
    return kExitOk;
}

int run_sweep(const std::vector<RunOptions>& sweeps, const std::string& out_path, const std::string& format,
              const std::string& summary_path)
{
    const auto fmt = parse_metrics_format(format);
    std::vector<ExperimentConfig> configs;
    for (const auto& o : sweeps) configs.push_back(build_config(o));
    auto result = run_experiments(configs);
    emit(out_path, emit_metrics(result.rows, fmt));
    if (!summary_path.empty()) write_text_file(summary_path, emit_aggregates(aggregate_metrics(result.rows), fmt));
    int code = kExitOk;
    for (const auto& f : result.failures) {
        std::cerr << "error: scenario " << f.scenario << ": " << f.message << "\n";
        code = std::max(code, f.exit_code);
    }
    return code;
}

HttpService* g_service = nullptr;

void on_signal(int)
{
    if (g_service) g_service->stop();
}

int run_serve(const std::string& host, int port, const std::vector<std::string>& presets, int idle_minutes)
{
    ServiceOptions opts;
    opts.presets = presets;
    opts.idle_timeout = std::chrono::minutes(idle_minutes);
    SessionManager manager(opts);
    HttpService service(manager);
    const int bound = service.bind(host, port);
    if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    std::cerr << "listening on http://" << host << ":" << bound << "/api/v1/presets\n";
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.listen_after_bind();
    g_service = nullptr;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Permissive strategy templates for human-robot interaction"};
    app.require_subcommand(1);

    DomainOptions synth_domain;
    std::string synth_task, synth_out;
    auto* synth = app.add_subcommand("synth", "Build the game for a domain and task and synthesize templates");
    add_domain_options(synth, synth_domain);
    synth->add_option("--task", synth_task, "Robot task")->required();
    synth->add_option("--out", synth_out, "Write the template document here");

    RunOptions sim_opts;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Run one seeded session and print its log");
    add_run_options(simulate, sim_opts, false);
    simulate->add_option("--out", sim_out, "Log file (default: stdout)");

    RunOptions exp_opts;
    std::vector<std::string> exp_scenarios;
    std::string exp_out, exp_format = "csv", exp_summary;
    auto* experiment = app.add_subcommand("experiment", "Sweep thresholds and runs and emit metrics");
    add_run_options(experiment, exp_opts, true);
    experiment->remove_option(experiment->get_option("--scenario"));
    experiment->add_option("--scenario", exp_scenarios, "Presets to run (repeatable; default: the three recipe scenarios)");
    experiment->add_option("--out", exp_out, "Metrics file (default: stdout)");
    experiment->add_option("--format", exp_format, "csv or jsonl");
    experiment->add_option("--summary", exp_summary, "Also write per-threshold means and deviations here");

    std::string host = "127.0.0.1";
    int port = 8080;
    int idle_minutes = 30;
    std::vector<std::string> serve_presets;
    auto* serve = app.add_subcommand("serve", "Start the interactive session service");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--preset", serve_presets, "Presets to load (default: all)");
    serve->add_option("--idle-minutes", idle_minutes, "Session idle timeout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*synth) return run_synth(synth_domain, synth_task, synth_out);
        if (*simulate) return run_simulate(sim_opts, sim_out);
        if (*experiment) {
            std::vector<RunOptions> sweeps;
            if (exp_scenarios.empty() && exp_opts.task.empty())
                exp_scenarios = {"identical", "incompatible", "compatible"};
            if (exp_scenarios.empty()) sweeps.push_back(exp_opts);
            for (const auto& s : exp_scenarios) {
                auto o = exp_opts;
                o.scenario = s;
                sweeps.push_back(o);
            }
            return run_sweep(sweeps, exp_out, exp_format, exp_summary);
        }
        if (*serve) return run_serve(host, port, serve_presets, idle_minutes);
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const SynthesisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSynthesis;
    } catch (const ServiceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == "synthesis_failed") return kExitSynthesis;
        if (e.code() == "capacity") return kExitCapacity;
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
