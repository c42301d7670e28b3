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

// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the pure-Python wrapper in python/hrli.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hrli/harness.hpp"
#include "hrli/service.hpp"

namespace py = pybind11;
using namespace hrli;

namespace {

std::string synth_report(const std::string& domain, const std::string& task)
{
    const auto p = prepare_game(parse_domain_spec(domain), task);
    nlohmann::ordered_json j{{"domain", p.domain.spec.describe()},
                             {"states", p.domain.domain->num_states()},
                             {"propositions", p.domain.domain->propositions()},
                             {"vertices", p.game->num_vertices()},
                             {"winning", p.templates.winning.count()},
                             {"robot_live_groups", p.templates.robot.live_groups.size()},
                             {"human_live_groups", p.templates.human.live_groups.size()},
                             {"seconds", p.build_seconds + p.product_seconds + p.synthesis_seconds}};
    return j.dump();
}

ExperimentConfig preset_with(const std::string& scenario, const std::vector<double>& alphas, std::size_t runs,
                             std::uint64_t seed_base, std::size_t max_moves)
{
    auto c = scenario_preset(scenario);
    if (!alphas.empty()) c.alphas = alphas;
    if (runs > 0) c.runs = runs;
    c.seed_base = seed_base;
    if (max_moves > 0) c.max_moves = max_moves;
    return c;
}

std::string simulate_scenario(const std::string& scenario, double alpha, std::uint64_t seed, std::size_t max_moves)
{
    auto c = preset_with(scenario, {alpha}, 1, seed, max_moves);
    std::string log;
    run_experiment(c, [&](const MetricsRow&, const RunRecord& r) { log = run_record_to_jsonl(r); });
    return log;
}

std::string experiment_jsonl(const std::string& scenario, const std::vector<double>& alphas, std::size_t runs,
                             std::uint64_t seed_base, std::size_t max_moves)
{
    return emit_metrics(run_experiment(preset_with(scenario, alphas, runs, seed_base, max_moves)),
                        MetricsFormat::JsonLines);
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& p : scenario_presets()) out.push_back(p.name);
    return out;
}

/// Session service without the HTTP layer; requests and responses are JSON text.
class PySessionService {
public:
    explicit PySessionService(std::vector<std::string> presets)
    {
        ServiceOptions o;
        o.presets = std::move(presets);
        manager_ = std::make_unique<SessionManager>(o);
    }
    std::string request(const std::string& method, const std::string& path, const std::string& body)
    {
        py::gil_scoped_release release;
        last_ = dispatch(*manager_, method, path, body);
        return last_.body;
    }
    int last_status() const { return last_.status; }

private:
    std::unique_ptr<SessionManager> manager_;
    ApiResponse last_;
};

} // namespace

PYBIND11_MODULE(_hrli, m)
{
    m.doc() = "Native core of the hrli package";
    m.attr("protocol_version") = kProtocolVersion;

    auto base = py::register_exception<Error>(m, "HrliError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<SynthesisError>(m, "SynthesisError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    m.def("synth", &synth_report, py::arg("domain"), py::arg("task"),
          "Builds the game for a domain and robot task, synthesizes templates and returns a JSON report.");
    m.def("simulate", &simulate_scenario, py::arg("scenario"), py::arg("alpha"), py::arg("seed") = 1000,
          py::arg("max_moves") = 0, py::call_guard<py::gil_scoped_release>(),
          "Runs one seeded session of a scenario preset and returns its line-delimited log.");
    m.def("experiment", &experiment_jsonl, py::arg("scenario"), py::arg("alphas") = std::vector<double>{},
          py::arg("runs") = 0, py::arg("seed_base") = 1000, py::arg("max_moves") = 0,
          py::call_guard<py::gil_scoped_release>(), "Runs a preset sweep and returns metrics as JSON lines.");
    m.def("scenario_presets", &preset_names);

    py::class_<PySessionService>(m, "SessionService")
        .def(py::init<std::vector<std::string>>(), py::arg("presets") = std::vector<std::string>{})
        .def("request", &PySessionService::request, py::arg("method"), py::arg("path"), py::arg("body") = "")
        .def_property_readonly("last_status", &PySessionService::last_status);
}
