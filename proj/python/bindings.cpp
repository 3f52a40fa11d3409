#include "orbitpe/agent.hpp"
#include "orbitpe/dataset.hpp"
#include "orbitpe/evaluation.hpp"
#include "orbitpe/json_io.hpp"

#include <fmt/format.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace orbitpe;

namespace {

py::object to_python(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

ThrottleVector throttle_from(const py::object& action) {
    if (py::isinstance<py::str>(action)) {
        const auto word = action.cast<std::string>();
        const auto verbal = verbal_action_from_string(word);
        if (!verbal) {
            throw DomainError(fmt::format("unknown action '{}'", word));
        }
        return action_to_throttle(*verbal);
    }
    if (py::isinstance<ThrottleVector>(action)) {
        return action.cast<ThrottleVector>();
    }
    const auto t = action.cast<std::tuple<int, int, int>>();
    ThrottleVector v{std::get<0>(t), std::get<1>(t), std::get<2>(t)};
    v.validate();
    return v;
}

struct AgentSpec {
    std::unique_ptr<ChatBackend> backend;
    AgentFactory factory;
};

AgentSpec make_agent(const std::string& kind, const std::string& endpoint, std::size_t window) {
    AgentSpec spec;
    if (kind == "navball") {
        spec.factory = navball_agent_factory();
    } else if (kind == "coast") {
        spec.factory = coast_agent_factory();
    } else if (kind == "llm") {
        EndpointConfig ep;
        if (!endpoint.empty()) {
            ep.base_url = endpoint;
        }
        spec.backend = std::make_unique<HttpChatClient>(ep);
        LlmAgentConfig cfg;
        cfg.window_capacity = window;
        spec.factory = llm_agent_factory(*spec.backend, cfg);
    } else {
        throw DomainError(fmt::format("unknown agent '{}' (navball, llm, coast)", kind));
    }
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Orbital pursuit-evasion environment, pilots, datasets and evaluation.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<GenerationFailure>(m, "GenerationFailure", base.ptr());
    py::register_exception<EpisodeFinishedError>(m, "EpisodeFinishedError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    m.attr("DEGREE") = kDegree;

    py::class_<BodyConstants>(m, "BodyConstants")
        .def(py::init<>())
        .def(py::init([](double mu, double r) { return BodyConstants{mu, r}; }), py::arg("mu"),
             py::arg("surface_radius"))
        .def_readwrite("mu", &BodyConstants::mu)
        .def_readwrite("surface_radius", &BodyConstants::surface_radius);

    py::class_<OrbitalElements>(m, "OrbitalElements")
        .def(py::init([](double a, double e, double i, double raan, double argp, double nu) {
                 return OrbitalElements{a, e, i, raan, argp, nu};
             }),
             py::arg("a"), py::arg("e") = 0.0, py::arg("i") = 0.0, py::arg("raan") = 0.0, py::arg("argp") = 0.0,
             py::arg("nu") = 0.0)
        .def_readwrite("a", &OrbitalElements::semimajor_axis)
        .def_readwrite("e", &OrbitalElements::eccentricity)
        .def_readwrite("i", &OrbitalElements::inclination)
        .def_readwrite("raan", &OrbitalElements::raan)
        .def_readwrite("argp", &OrbitalElements::arg_periapsis)
        .def_readwrite("nu", &OrbitalElements::true_anomaly)
        .def("__repr__", [](const OrbitalElements& el) {
            return fmt::format("OrbitalElements(a={}, e={}, i={}, raan={}, argp={}, nu={})", el.semimajor_axis,
                               el.eccentricity, el.inclination, el.raan, el.arg_periapsis, el.true_anomaly);
        });

    py::class_<StateVector>(m, "StateVector")
        .def(py::init([](const Vec3& r, const Vec3& v, double t) { return StateVector{r, v, t}; }),
             py::arg("position"), py::arg("velocity"), py::arg("epoch") = 0.0)
        .def_readwrite("position", &StateVector::position)
        .def_readwrite("velocity", &StateVector::velocity)
        .def_readwrite("epoch", &StateVector::epoch);

    m.def("solve_kepler", &solve_kepler, py::arg("mean_anomaly"), py::arg("e"));
    m.def("elements_to_state", &elements_to_state, py::arg("elements"), py::arg("body") = BodyConstants{},
          py::arg("epoch") = 0.0);
    m.def("state_to_elements", &state_to_elements, py::arg("state"), py::arg("body") = BodyConstants{});
    m.def("propagate_coast", py::overload_cast<const StateVector&, double, const BodyConstants&>(&propagate_coast),
          py::arg("state"), py::arg("dt"), py::arg("body") = BodyConstants{});
    m.def("propagate_thrusted", &propagate_thrusted, py::arg("state"), py::arg("accel_rsw"), py::arg("dt"),
          py::arg("substep") = 0.1, py::arg("body") = BodyConstants{},
          py::arg("max_axis_accel") = std::numeric_limits<double>::infinity());
    m.def("orbital_period", &orbital_period, py::arg("a"), py::arg("body") = BodyConstants{});
    m.def("specific_energy", &specific_energy, py::arg("state"), py::arg("body") = BodyConstants{});

    py::class_<ScenarioConstraints>(m, "ScenarioConstraints")
        .def(py::init<>())
        .def_readwrite("max_eccentricity", &ScenarioConstraints::max_eccentricity)
        .def_readwrite("max_inclination_delta", &ScenarioConstraints::max_inclination_delta)
        .def_readwrite("max_initial_distance", &ScenarioConstraints::max_initial_distance)
        .def_readwrite("target_initial_distance", &ScenarioConstraints::target_initial_distance)
        .def_readwrite("mission_duration", &ScenarioConstraints::mission_duration);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("pursuer", &Scenario::pursuer)
        .def_readwrite("evader", &Scenario::evader)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("body", &Scenario::body)
        .def_readwrite("constraints", &Scenario::constraints)
        .def("to_json", &serialize_scenario)
        .def_static("from_json", &parse_scenario, py::arg("text"))
        .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

    m.def("sample_scenario",
          [](std::uint64_t seed, const ScenarioConstraints& c) { return sample_scenario(default_evader_elements(), c, seed); },
          py::arg("seed"), py::arg("constraints") = ScenarioConstraints{});
    m.def("generate_batch",
          [](int count, std::uint64_t seed, const ScenarioConstraints& c) {
              return generate_batch(default_evader_elements(), c, count, seed);
          },
          py::arg("count"), py::arg("seed"), py::arg("constraints") = ScenarioConstraints{});
    m.def("verify_constraints", [](const Scenario& s) { return to_python(json(verify_constraints(s))); },
          "List of {name, passed, measured, limit} checks.");
    m.def("initial_separation", &initial_separation);

    py::class_<ThrottleVector>(m, "ThrottleVector")
        .def(py::init([](int r, int s, int w) {
                 ThrottleVector t{r, s, w};
                 t.validate();
                 return t;
             }),
             py::arg("r") = 0, py::arg("s") = 0, py::arg("w") = 0)
        .def_readonly("r", &ThrottleVector::radial)
        .def_readonly("s", &ThrottleVector::along_track)
        .def_readonly("w", &ThrottleVector::cross_track)
        .def("__eq__", [](const ThrottleVector& a, const ThrottleVector& b) { return a == b; });

    m.def("action_to_throttle", [](const std::string& word) { return throttle_from(py::str(word)); });

    py::class_<Observation>(m, "Observation")
        .def_readonly("mission_time", &Observation::mission_time)
        .def_readonly("pursuer_position", &Observation::pursuer_position)
        .def_readonly("pursuer_velocity", &Observation::pursuer_velocity)
        .def_readonly("evader_position", &Observation::evader_position)
        .def_readonly("evader_velocity", &Observation::evader_velocity)
        .def_readonly("relative_position", &Observation::relative_position)
        .def_readonly("relative_velocity", &Observation::relative_velocity)
        .def_readonly("range", &Observation::range)
        .def_readonly("range_rate", &Observation::range_rate)
        .def("to_dict", [](const Observation& o) { return to_python(json(o)); });

    py::class_<StepResult>(m, "StepResult")
        .def_readonly("observation", &StepResult::observation)
        .def_readonly("terminated", &StepResult::terminated)
        .def_property_readonly("termination_reason",
                               [](const StepResult& r) { return std::string(to_string(r.termination_reason)); });

    py::class_<Environment>(m, "Environment")
        .def(py::init([](double interval, double substep) {
                 EnvironmentConfig cfg;
                 cfg.decision_interval = interval;
                 cfg.substep = substep;
                 return Environment(cfg);
             }),
             py::arg("decision_interval") = 1.0, py::arg("substep") = 0.1)
        .def("reset", &Environment::reset, py::arg("scenario"))
        .def("step", [](Environment& env, const py::object& action) { return env.step(throttle_from(action)); },
             py::arg("action"), "Action word (\"forward\", ...) or an (r, s, w) throttle triple.")
        .def_property_readonly("observation", &Environment::observation)
        .def_property_readonly("active", &Environment::active)
        .def_property_readonly("terminated", &Environment::terminated)
        .def_property_readonly("step_count", &Environment::step_count)
        .def_property_readonly("max_steps", &Environment::max_steps);

    m.def("navball_decide", [](const Observation& o) { return std::string(to_string(navball_decide(o))); });

    py::class_<EpisodeLog>(m, "EpisodeLog")
        .def_readonly("id", &EpisodeLog::id)
        .def_readonly("seed", &EpisodeLog::seed)
        .def("__len__", [](const EpisodeLog& log) { return log.steps.size(); })
        .def("closest_approach",
             [](const EpisodeLog& log) {
                 const auto ca = closest_approach(log);
                 return py::make_tuple(ca.distance, ca.time);
             })
        .def("to_jsonl", &to_jsonl)
        .def_static("from_jsonl", &parse_jsonl, py::arg("text"), py::arg("id") = "")
        .def("save", [](const EpisodeLog& log, const std::string& path) { write_episode_log(path, log); })
        .def_static("load", [](const std::string& path) { return read_episode_log(path); });

    m.def(
        "run_episode",
        [](const Scenario& scenario, const std::string& agent, const std::string& endpoint, std::size_t window) {
            AgentSpec spec = make_agent(agent, endpoint, window);
            auto pilot = spec.factory(scenario);
            py::gil_scoped_release release;
            return run_episode(scenario, *pilot);
        },
        py::arg("scenario"), py::arg("agent") = "navball", py::arg("endpoint") = "", py::arg("window") = 0);

    m.def(
        "evaluate",
        [](const std::vector<Scenario>& scenarios, const std::string& agent, int workers, const std::string& endpoint,
           std::size_t window) {
            AgentSpec spec = make_agent(agent, endpoint, window);
            EvaluationReport report;
            {
                py::gil_scoped_release release;
                report = evaluate(scenarios, spec.factory, agent, workers);
            }
            return to_python(json(report));
        },
        py::arg("scenarios"), py::arg("agent") = "navball", py::arg("workers") = 1, py::arg("endpoint") = "",
        py::arg("window") = 0, "Report dict with best/average/worst distance and failure statistics.");

    m.def(
        "build_dataset",
        [](std::vector<EpisodeLog> logs, int top_k, std::size_t window, const std::string& profile,
           const std::string& tie_break) {
            std::vector<TrainingExample> examples;
            for (const auto& log : select_top_k(std::move(logs), top_k, tie_break_from_string(tie_break))) {
                auto more = log_to_examples(log, window, prompt_profile_from_string(profile));
                examples.insert(examples.end(), more.begin(), more.end());
            }
            return examples_to_jsonl(examples);
        },
        py::arg("logs"), py::arg("top_k") = 50, py::arg("window") = 0, py::arg("profile") = "agnostic",
        py::arg("tie_break") = "time", "JSON-lines chat examples from the top_k best logs.");
}
