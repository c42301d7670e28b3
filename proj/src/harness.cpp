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

#include "hrli/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "text_util.hpp"

namespace hrli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto at = s.find(sep, pos);
        if (at == std::string_view::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, at - pos));
        pos = at + 1;
    }
}

int parse_positive(std::string_view text, const char* what)
{
    auto v = detail::parse_int<int>(text);
    if (!v || *v < 0) throw ConfigError(std::string("bad ") + what + " '" + std::string(text) + "'");
    return *v;
}

/// Single recurrence goal of `task`, if it has exactly one.
std::optional<PropFormula> single_goal(const TaskFormula& task)
{
    if (task.recurrence.size() != 1) return std::nullopt;
    return task.recurrence.front();
}

} // namespace

// ---------------------------------------------------------------------------
// Domains

std::string DomainSpec::describe() const
{
    switch (kind) {
    case DomainKind::Gridworld:
        return "gridworld:" + std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + ":" +
               std::to_string(grid.max_objects_per_agent);
    case DomainKind::Kitchen: return "kitchen:desk";
    case DomainKind::File: return "file:" + path;
    }
    return "unknown";
}

DomainSpec parse_domain_spec(std::string_view text)
{
    text = detail::trim(text);
    DomainSpec spec;
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const auto tail = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "gridworld") {
        spec.kind = DomainKind::Gridworld;
        if (colon == std::string_view::npos) return spec;
        auto parts = split(tail, ':');
        if (parts.size() > 2) throw ConfigError("bad gridworld spec '" + std::string(text) + "'");
        auto dims = split(parts[0], 'x');
        if (dims.size() != 2) throw ConfigError("gridworld size must look like 3x3");
        spec.grid.rows = parse_positive(dims[0], "row count");
        spec.grid.cols = parse_positive(dims[1], "column count");
        if (parts.size() == 2) spec.grid.max_objects_per_agent = parse_positive(parts[1], "block cap");
        return spec;
    }
    if (head == "kitchen") {
        if (colon != std::string_view::npos && tail != "desk")
            throw ConfigError("unknown kitchen layout '" + std::string(tail) + "' (known: desk)");
        spec.kind = DomainKind::Kitchen;
        return spec;
    }
    if (head == "file") {
        if (tail.empty()) throw ConfigError("file domain needs a path");
        spec.kind = DomainKind::File;
        spec.path = std::string(tail);
        return spec;
    }
    throw ConfigError("unknown domain '" + std::string(text) + "' (known: gridworld, kitchen, file:<path>)");
}

LoadedDomain load_domain(const DomainSpec& spec)
{
    LoadedDomain out;
    out.spec = spec;
    switch (spec.kind) {
    case DomainKind::Gridworld: {
        auto gw = std::make_shared<Gridworld>(build_gridworld(spec.grid));
        out.domain = std::make_shared<const PlanningDomain>(gw->domain);
        out.grid = std::move(gw);
        break;
    }
    case DomainKind::Kitchen: {
        auto k = std::make_shared<Kitchen>(build_kitchen(spec.kitchen));
        out.domain = std::make_shared<const PlanningDomain>(k->domain);
        out.kitchen = std::move(k);
        break;
    }
    case DomainKind::File: {
        auto d = parse_domain(read_text_file(spec.path));
        auto problems = validate_domain(d);
        if (!problems.empty()) throw ConfigError("invalid domain in " + spec.path + ": " + problems.front());
        out.domain = std::make_shared<const PlanningDomain>(std::move(d));
        break;
    }
    }
    return out;
}

PreparedGame prepare_game(LoadedDomain domain, const std::string& robot_task)
{
    PreparedGame p;
    p.domain = std::move(domain);
    const auto& ap = p.domain.domain->propositions();
    p.task = parse_task(robot_task, ap);
    auto t0 = Clock::now();
    p.game = std::make_shared<const ParityGame>(product(p.domain.domain, compile_monitor(p.task, ap)));
    p.product_seconds = seconds_since(t0);
    t0 = Clock::now();
    p.templates = synthesize_templates(*p.game);
    p.synthesis_seconds = seconds_since(t0);
    return p;
}

PreparedGame prepare_game(const DomainSpec& spec, const std::string& robot_task)
{
    const auto t0 = Clock::now();
    auto loaded = load_domain(spec);
    const double build = seconds_since(t0);
    auto p = prepare_game(std::move(loaded), robot_task);
    p.build_seconds = build;
    return p;
}

// ---------------------------------------------------------------------------
// Simulated humans

std::string HumanSpec::describe() const
{
    switch (kind) {
    case HumanKind::Probabilistic: {
        std::string s = "probabilistic:compliance=" + detail::format_double(params.compliance) +
                        ",heed=" + detail::format_double(params.heed) +
                        ",patience=" + std::to_string(params.patience) + ",greedy=" + (params.greedy ? "1" : "0");
        return s;
    }
    case HumanKind::Random: return "random";
    case HumanKind::Diagonal: return "diagonal";
    case HumanKind::Obstructing: return "obstructor";
    }
    return "unknown";
}

HumanSpec parse_human_spec(std::string_view text)
{
    text = detail::trim(text);
    HumanSpec spec;
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    if (head == "random" || head == "diagonal" || head == "obstructor") {
        if (colon != std::string_view::npos) throw ConfigError("human model '" + std::string(head) + "' takes no parameters");
        spec.kind = head == "random" ? HumanKind::Random : head == "diagonal" ? HumanKind::Diagonal : HumanKind::Obstructing;
        return spec;
    }
    if (head != "probabilistic")
        throw ConfigError("unknown human model '" + std::string(text) + "' (known: probabilistic, random, diagonal, obstructor)");
    if (colon == std::string_view::npos) return spec;
    for (auto item : split(text.substr(colon + 1), ',')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key=value in '" + std::string(item) + "'");
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);
        auto probability = [&]() {
            auto v = detail::parse_double(value);
            if (!v || *v < 0.0 || *v > 1.0)
                throw ConfigError(std::string(key) + " must be a probability, got '" + std::string(value) + "'");
            return *v;
        };
        if (key == "compliance") spec.params.compliance = probability();
        else if (key == "heed") spec.params.heed = probability();
        else if (key == "patience") spec.params.patience = static_cast<std::size_t>(parse_positive(value, "patience"));
        else if (key == "greedy") {
            if (value != "0" && value != "1") throw ConfigError("greedy must be 0 or 1");
            spec.params.greedy = value == "1";
        } else {
            throw ConfigError("unknown human parameter '" + std::string(key) + "'");
        }
    }
    return spec;
}

std::unique_ptr<HumanModel> make_human(const HumanSpec& spec, const LoadedDomain& domain, const std::string& human_task)
{
    switch (spec.kind) {
    case HumanKind::Probabilistic: {
        if (human_task.empty()) throw ConfigError("the probabilistic human needs a task");
        auto task = parse_task(human_task, domain.domain->propositions());
        return std::make_unique<ProbabilisticHuman>(domain.domain, task, spec.params);
    }
    case HumanKind::Random: return std::make_unique<RandomHuman>();
    case HumanKind::Obstructing: return std::make_unique<ObstructingHuman>();
    case HumanKind::Diagonal: {
        if (!domain.grid) throw ConfigError("the diagonal builder needs a gridworld domain");
        auto grid = domain.grid;
        return std::make_unique<PolicyHuman>("diagonal", [grid](StateId s) { return diagonal_builder_move(*grid, s); });
    }
    }
    throw ConfigError("unknown human model");
}

// ---------------------------------------------------------------------------
// Experiments

void ExperimentConfig::validate() const
{
    if (robot_task.empty()) throw ConfigError("scenario '" + scenario + "' has no robot task");
    if (alphas.empty()) throw ConfigError("scenario '" + scenario + "' has no alpha values");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha must lie in [0, 1], got " + detail::format_double(a));
    if (runs == 0) throw ConfigError("runs must be at least 1");
    if (timeout_seconds < 0.0) throw ConfigError("timeout must be non-negative");
}

const std::vector<ScenarioPreset>& scenario_presets()
{
    static const std::vector<ScenarioPreset> presets = [] {
        std::vector<double> sweep;
        for (int i = 0; i <= 10; ++i) sweep.push_back(i / 100.0);

        auto cooking = [&](std::string name, std::string description, std::string robot, std::string human) {
            ScenarioPreset p;
            p.name = name;
            p.description = std::move(description);
            auto& c = p.config;
            c.scenario = std::move(name);
            c.domain.kind = DomainKind::Kitchen;
            c.robot_task = "G F (" + robot + ")";
            c.human_task = "G F (" + human + ")";
            c.robot_recipe = std::move(robot);
            c.human_recipe = std::move(human);
            c.event = "!delivered_onions_0";
            c.alphas = sweep;
            c.runs = 10;
            c.max_moves = 500;
            c.goal_events = 10;
            return p;
        };

        std::vector<ScenarioPreset> out;
        out.push_back(cooking("identical", "both agents want three-onion soups", "delivered_onions_3",
                              "delivered_onions_3"));
        out.push_back(cooking("incompatible", "robot wants three onions, human wants two", "delivered_onions_3",
                              "delivered_onions_2"));
        out.push_back(cooking("compatible", "robot wants two or three onions, human one or two",
                              "delivered_onions_2 | delivered_onions_3", "delivered_onions_1 | delivered_onions_2"));

        ScenarioPreset adapt;
        adapt.name = "adaptation";
        adapt.description = "gridworld robot keeping cells non-adjacent while the human builds a diagonal";
        auto& c = adapt.config;
        c.scenario = "adaptation";
        c.domain.kind = DomainKind::Gridworld;
        c.robot_task = "G F (adj & major)";
        c.human.kind = HumanKind::Diagonal;
        c.event = "adj & major";
        c.robot_recipe = "adj & major";
        c.human_recipe = "diag";
        c.stop_when = "adj & major & diag";
        c.alphas = {0.05};
        c.runs = 100;
        c.max_moves = 200;
        c.goal_events = 0;
        c.seed_base = 7000;
        out.push_back(std::move(adapt));
        return out;
    }();
    return presets;
}

ExperimentConfig scenario_preset(std::string_view name)
{
    std::string known;
    for (const auto& p : scenario_presets()) {
        if (p.name == name) return p.config;
        known += (known.empty() ? "" : ", ") + p.name;
    }
    throw LookupError("unknown scenario '" + std::string(name) + "' (known: " + known + ")");
}

MetricsRow metrics_from_run(const std::string& scenario, std::size_t run, const RunRecord& r)
{
    MetricsRow m;
    m.scenario = scenario;
    m.alpha = r.alpha;
    m.run = run;
    m.seed = r.seed;
    m.events = r.events.size();
    for (const auto& e : r.events) {
        m.robot_events += e.robot_recipe;
        m.human_events += e.human_recipe;
        m.joint_events += e.robot_recipe && e.human_recipe;
    }
    auto pct = [&](std::size_t k) { return m.events == 0 ? 0.0 : 100.0 * static_cast<double>(k) / static_cast<double>(m.events); };
    m.robot_pct = pct(m.robot_events);
    m.human_pct = pct(m.human_events);
    m.joint_pct = pct(m.joint_events);
    auto half = [&](std::size_t k) { return m.events > 0 && 2 * k >= m.events; };
    m.robot_run = half(m.robot_events);
    m.human_run = half(m.human_events);
    m.joint_run = half(m.joint_events);
    m.feedback_messages = r.feedback_messages;
    m.human_turns = r.human_turns;
    m.feedback_frequency =
        r.human_turns == 0 ? 0.0 : static_cast<double>(r.feedback_messages) / static_cast<double>(r.human_turns);
    m.moves = r.moves.size();
    m.resyntheses = r.resyntheses;
    m.timed_out = r.timed_out;
    m.status = r.timed_out ? "timeout" : status_name(r.status);
    return m;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& c, const PreparedGame& prepared, const RunObserver& observer)
{
    c.validate();
    const auto& ap = prepared.domain.domain->propositions();
    SimulationSpec base;
    base.game = prepared.game;
    base.templates = prepared.templates;
    base.session.window = c.window;
    base.session.robot_choice = c.robot_choice;
    base.session.colive_budget = c.colive_budget;
    base.max_moves = c.max_moves;
    base.stop_after_events = c.goal_events;
    base.time_limit_seconds = c.timeout_seconds;

    std::optional<TaskFormula> human_task;
    if (!c.human_task.empty()) human_task = parse_task(c.human_task, ap);
    base.robot_recipe = c.robot_recipe.empty() ? single_goal(prepared.task) : parse_prop(c.robot_recipe, ap);
    if (!c.human_recipe.empty()) base.human_recipe = parse_prop(c.human_recipe, ap);
    else if (human_task) base.human_recipe = single_goal(*human_task);
    if (!c.event.empty()) base.event = parse_prop(c.event, ap);
    else base.event = base.robot_recipe;
    if (!c.stop_when.empty()) base.stop_when = parse_prop(c.stop_when, ap);

    const std::size_t jobs = c.alphas.size() * c.runs;
    std::vector<MetricsRow> rows(jobs);
    std::mutex observer_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&](HumanModel& human) {
        while (true) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) return;
            const std::size_t run = job % c.runs;
            SimulationSpec spec = base;
            spec.session.alpha = c.alphas[job / c.runs];
            spec.session.seed = c.seed_base + run;
            auto record = simulate(spec, human);
            rows[job] = metrics_from_run(c.scenario, run, record);
            if (observer) {
                std::lock_guard lock(observer_mutex);
                observer(rows[job], record);
            }
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(c.threads, jobs));
    std::vector<std::unique_ptr<HumanModel>> humans;
    for (std::size_t i = 0; i < threads; ++i) humans.push_back(make_human(c.human, prepared.domain, c.human_task));
    if (threads == 1) {
        worker(*humans.front());
        return rows;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t i = 0; i < threads; ++i) {
        pool.emplace_back([&, i] {
            try {
                worker(*humans[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(jobs);
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& c, const RunObserver& observer)
{
    c.validate();
    return run_experiment(c, prepare_game(c.domain, c.robot_task), observer);
}

SweepResult run_experiments(const std::vector<ExperimentConfig>& configs, const RunObserver& observer)
{
    SweepResult out;
    for (const auto& c : configs) {
        try {
            auto rows = run_experiment(c, observer);
            out.rows.insert(out.rows.end(), rows.begin(), rows.end());
        } catch (const CapacityError& e) {
            out.failures.push_back({c.scenario, e.what(), 4});
        } catch (const SynthesisError& e) {
            out.failures.push_back({c.scenario, e.what(), 3});
        } catch (const Error& e) {
            out.failures.push_back({c.scenario, e.what(), 2});
        }
    }
    return out;
}

SummaryStat summarize(const std::vector<double>& values)
{
    SummaryStat s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return s;
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    return s;
}

std::vector<AggregateRow> aggregate_metrics(const std::vector<MetricsRow>& rows)
{
    std::vector<std::pair<std::string, double>> keys;
    std::map<std::pair<std::string, double>, std::vector<const MetricsRow*>> cells;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.scenario, r.alpha);
        auto& cell = cells[key];
        if (cell.empty()) keys.push_back(key);
        cell.push_back(&r);
    }
    std::vector<AggregateRow> out;
    for (const auto& key : keys) {
        const auto& cell = cells[key];
        AggregateRow a;
        a.scenario = key.first;
        a.alpha = key.second;
        a.runs = cell.size();
        auto column = [&](auto get) {
            std::vector<double> v;
            for (const auto* r : cell) v.push_back(static_cast<double>(get(*r)));
            return summarize(v);
        };
        a.robot_pct = column([](const MetricsRow& r) { return r.robot_pct; });
        a.human_pct = column([](const MetricsRow& r) { return r.human_pct; });
        a.joint_pct = column([](const MetricsRow& r) { return r.joint_pct; });
        a.feedback_frequency = column([](const MetricsRow& r) { return r.feedback_frequency; });
        a.moves = column([](const MetricsRow& r) { return r.moves; });
        a.robot_runs_pct = 100.0 * column([](const MetricsRow& r) { return r.robot_run; }).mean;
        a.human_runs_pct = 100.0 * column([](const MetricsRow& r) { return r.human_run; }).mean;
        a.joint_runs_pct = 100.0 * column([](const MetricsRow& r) { return r.joint_run; }).mean;
        out.push_back(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Export

MetricsFormat parse_metrics_format(std::string_view text)
{
    if (text == "csv") return MetricsFormat::Csv;
    if (text == "jsonl" || text == "json-lines") return MetricsFormat::JsonLines;
    throw ConfigError("unknown format '" + std::string(text) + "' (known: csv, jsonl)");
}

const std::vector<std::string>& metrics_columns()
{
    static const std::vector<std::string> columns{
        "scenario",     "alpha",         "run",       "seed",      "events",
        "robot_events", "human_events",  "joint_events", "robot_pct", "human_pct",
        "joint_pct",    "robot_run",     "human_run", "joint_run", "feedback_messages",
        "human_turns",  "feedback_frequency", "moves", "resyntheses", "timed_out",
        "status"};
    return columns;
}

namespace {

/// Column values of a row as text, in metrics_columns() order.
std::vector<std::string> row_fields(const MetricsRow& r)
{
    using detail::format_double;
    auto n = [](auto v) { return std::to_string(v); };
    auto b = [](bool v) { return std::string(v ? "1" : "0"); };
    return {r.scenario,
            format_double(r.alpha),
            n(r.run),
            n(r.seed),
            n(r.events),
            n(r.robot_events),
            n(r.human_events),
            n(r.joint_events),
            format_double(r.robot_pct),
            format_double(r.human_pct),
            format_double(r.joint_pct),
            b(r.robot_run),
            b(r.human_run),
            b(r.joint_run),
            n(r.feedback_messages),
            n(r.human_turns),
            format_double(r.feedback_frequency),
            n(r.moves),
            n(r.resyntheses),
            b(r.timed_out),
            r.status};
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(std::string_view line, std::size_t lineno)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"' && cur.empty()) {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", 0, lineno);
    out.push_back(std::move(cur));
    return out;
}

MetricsRow row_from_fields(const std::vector<std::string>& f, std::size_t lineno)
{
    const auto& cols = metrics_columns();
    if (f.size() != cols.size())
        throw ParseError("expected " + std::to_string(cols.size()) + " fields, got " + std::to_string(f.size()), 0, lineno);
    std::size_t i = 0;
    auto fail = [&](std::size_t k) -> ParseError {
        return ParseError("bad value '" + f[k] + "' for column " + cols[k], 0, lineno);
    };
    auto d = [&]() {
        auto v = detail::parse_double(f[i]);
        if (!v) throw fail(i);
        ++i;
        return *v;
    };
    auto u = [&]() {
        auto v = detail::parse_int<std::uint64_t>(f[i]);
        if (!v) throw fail(i);
        ++i;
        return *v;
    };
    auto z = [&]() { return static_cast<std::size_t>(u()); };
    auto b = [&]() {
        if (f[i] != "0" && f[i] != "1") throw fail(i);
        return f[i++] == "1";
    };
    MetricsRow r;
    r.scenario = f[i++];
    r.alpha = d();
    r.run = z();
    r.seed = u();
    r.events = z();
    r.robot_events = z();
    r.human_events = z();
    r.joint_events = z();
    r.robot_pct = d();
    r.human_pct = d();
    r.joint_pct = d();
    r.robot_run = b();
    r.human_run = b();
    r.joint_run = b();
    r.feedback_messages = z();
    r.human_turns = z();
    r.feedback_frequency = d();
    r.moves = z();
    r.resyntheses = z();
    r.timed_out = b();
    r.status = f[i++];
    return r;
}

nlohmann::ordered_json row_json(const MetricsRow& r)
{
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["alpha"] = r.alpha;
    j["run"] = r.run;
    j["seed"] = r.seed;
    j["events"] = r.events;
    j["robot_events"] = r.robot_events;
    j["human_events"] = r.human_events;
    j["joint_events"] = r.joint_events;
    j["robot_pct"] = r.robot_pct;
    j["human_pct"] = r.human_pct;
    j["joint_pct"] = r.joint_pct;
    j["robot_run"] = r.robot_run;
    j["human_run"] = r.human_run;
    j["joint_run"] = r.joint_run;
    j["feedback_messages"] = r.feedback_messages;
    j["human_turns"] = r.human_turns;
    j["feedback_frequency"] = r.feedback_frequency;
    j["moves"] = r.moves;
    j["resyntheses"] = r.resyntheses;
    j["timed_out"] = r.timed_out;
    j["status"] = r.status;
    return j;
}

MetricsRow row_from_json(const nlohmann::json& j)
{
    MetricsRow r;
    j.at("scenario").get_to(r.scenario);
    j.at("alpha").get_to(r.alpha);
    j.at("run").get_to(r.run);
    j.at("seed").get_to(r.seed);
    j.at("events").get_to(r.events);
    j.at("robot_events").get_to(r.robot_events);
    j.at("human_events").get_to(r.human_events);
    j.at("joint_events").get_to(r.joint_events);
    j.at("robot_pct").get_to(r.robot_pct);
    j.at("human_pct").get_to(r.human_pct);
    j.at("joint_pct").get_to(r.joint_pct);
    j.at("robot_run").get_to(r.robot_run);
    j.at("human_run").get_to(r.human_run);
    j.at("joint_run").get_to(r.joint_run);
    j.at("feedback_messages").get_to(r.feedback_messages);
    j.at("human_turns").get_to(r.human_turns);
    j.at("feedback_frequency").get_to(r.feedback_frequency);
    j.at("moves").get_to(r.moves);
    j.at("resyntheses").get_to(r.resyntheses);
    j.at("timed_out").get_to(r.timed_out);
    j.at("status").get_to(r.status);
    return r;
}

} // namespace

std::string emit_metrics(const std::vector<MetricsRow>& rows, MetricsFormat format)
{
    std::string out;
    if (format == MetricsFormat::Csv) {
        const auto& cols = metrics_columns();
        for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
        out += '\n';
        for (const auto& r : rows) {
            auto f = row_fields(r);
            for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + csv_escape(f[i]);
            out += '\n';
        }
        return out;
    }
    for (const auto& r : rows) out += row_json(r).dump() + '\n';
    return out;
}

std::vector<MetricsRow> parse_metrics(std::string_view text, MetricsFormat format)
{
    std::vector<MetricsRow> rows;
    const auto lines = detail::split_lines(text);
    if (format == MetricsFormat::Csv) {
        if (lines.empty()) throw ParseError("missing CSV header", 0, 1);
        const auto header = csv_split(detail::trim(lines.front()), 1);
        if (header != metrics_columns()) throw ParseError("unexpected CSV header", 0, 1);
        for (std::size_t i = 1; i < lines.size(); ++i) {
            auto line = detail::trim(lines[i]);
            if (line.empty()) continue;
            rows.push_back(row_from_fields(csv_split(line, i + 1), i + 1));
        }
        return rows;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = detail::trim(lines[i]);
        if (line.empty()) continue;
        try {
            rows.push_back(row_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad metrics line: ") + e.what(), 0, i + 1);
        }
    }
    return rows;
}

std::string emit_aggregates(const std::vector<AggregateRow>& rows, MetricsFormat format)
{
    using detail::format_double;
    const std::vector<std::string> cols{"scenario",        "alpha",         "runs",
                                        "robot_pct_mean",  "robot_pct_sd",  "human_pct_mean",
                                        "human_pct_sd",    "joint_pct_mean", "joint_pct_sd",
                                        "feedback_frequency_mean", "feedback_frequency_sd", "moves_mean",
                                        "moves_sd",        "robot_runs_pct", "human_runs_pct",
                                        "joint_runs_pct"};
    std::string out;
    if (format == MetricsFormat::Csv) {
        for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
        out += '\n';
    }
    for (const auto& a : rows) {
        std::vector<double> v{a.robot_pct.mean,          a.robot_pct.stddev, a.human_pct.mean, a.human_pct.stddev,
                              a.joint_pct.mean,          a.joint_pct.stddev, a.feedback_frequency.mean,
                              a.feedback_frequency.stddev, a.moves.mean,     a.moves.stddev,   a.robot_runs_pct,
                              a.human_runs_pct,          a.joint_runs_pct};
        if (format == MetricsFormat::Csv) {
            out += csv_escape(a.scenario) + "," + format_double(a.alpha) + "," + std::to_string(a.runs);
            for (double x : v) out += "," + format_double(x);
            out += '\n';
        } else {
            nlohmann::ordered_json j;
            j["scenario"] = a.scenario;
            j["alpha"] = a.alpha;
            j["runs"] = a.runs;
            for (std::size_t i = 0; i < v.size(); ++i) j[cols[i + 3]] = v[i];
            out += j.dump() + '\n';
        }
    }
    return out;
}

void write_text_file(const std::string& path, std::string_view content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(std::string("cannot open for writing (") + std::strerror(errno) + ")", path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw IoError("write failed", path);
}

std::string read_text_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(std::string("cannot open for reading (") + std::strerror(errno) + ")", path);
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("read failed", path);
    return ss.str();
}

} // namespace hrli
