#include "orbitpe/json_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace orbitpe {

void to_json(json& j, const BodyConstants& b) { j = json{{"mu", b.mu}, {"surface_radius", b.surface_radius}}; }

void from_json(const json& j, BodyConstants& b) {
    j.at("mu").get_to(b.mu);
    j.at("surface_radius").get_to(b.surface_radius);
}

void to_json(json& j, const OrbitalElements& el) {
    j = json{{"a", el.semimajor_axis}, {"e", el.eccentricity},      {"i", el.inclination},
             {"raan", el.raan},        {"argp", el.arg_periapsis}, {"nu", el.true_anomaly}};
}

void from_json(const json& j, OrbitalElements& el) {
    j.at("a").get_to(el.semimajor_axis);
    j.at("e").get_to(el.eccentricity);
    j.at("i").get_to(el.inclination);
    j.at("raan").get_to(el.raan);
    j.at("argp").get_to(el.arg_periapsis);
    j.at("nu").get_to(el.true_anomaly);
}

void to_json(json& j, const ScenarioConstraints& c) {
    j = json{{"max_eccentricity", c.max_eccentricity},
             {"max_inclination_delta", c.max_inclination_delta},
             {"max_initial_distance", c.max_initial_distance},
             {"target_initial_distance", c.target_initial_distance},
             {"mission_duration", c.mission_duration}};
}

void from_json(const json& j, ScenarioConstraints& c) {
    j.at("max_eccentricity").get_to(c.max_eccentricity);
    j.at("max_inclination_delta").get_to(c.max_inclination_delta);
    j.at("max_initial_distance").get_to(c.max_initial_distance);
    j.at("target_initial_distance").get_to(c.target_initial_distance);
    j.at("mission_duration").get_to(c.mission_duration);
}

void to_json(json& j, const Scenario& s) {
    j = json{{"seed", s.seed},
             {"body", s.body},
             {"constraints", s.constraints},
             {"pursuer", s.pursuer},
             {"evader", s.evader}};
}

void from_json(const json& j, Scenario& s) {
    j.at("seed").get_to(s.seed);
    j.at("body").get_to(s.body);
    j.at("constraints").get_to(s.constraints);
    j.at("pursuer").get_to(s.pursuer);
    j.at("evader").get_to(s.evader);
}

void to_json(json& j, const ConstraintReport& r) {
    j = json::array();
    for (const auto& c : r.checks) {
        j.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"limit", c.limit}});
    }
}

void to_json(json& j, const Observation& o) {
    j = json{{"mission_time", o.mission_time},
             {"pursuer_position", o.pursuer_position},
             {"pursuer_velocity", o.pursuer_velocity},
             {"evader_position", o.evader_position},
             {"evader_velocity", o.evader_velocity},
             {"relative_position", o.relative_position},
             {"relative_velocity", o.relative_velocity},
             {"range", o.range},
             {"range_rate", o.range_rate}};
}

void from_json(const json& j, Observation& o) {
    j.at("mission_time").get_to(o.mission_time);
    j.at("pursuer_position").get_to(o.pursuer_position);
    j.at("pursuer_velocity").get_to(o.pursuer_velocity);
    j.at("evader_position").get_to(o.evader_position);
    j.at("evader_velocity").get_to(o.evader_velocity);
    j.at("relative_position").get_to(o.relative_position);
    j.at("relative_velocity").get_to(o.relative_velocity);
    j.at("range").get_to(o.range);
    j.at("range_rate").get_to(o.range_rate);
}

void to_json(json& j, const ThrottleVector& t) {
    j = json{{"r", t.radial}, {"s", t.along_track}, {"w", t.cross_track}};
}

void from_json(const json& j, ThrottleVector& t) {
    j.at("r").get_to(t.radial);
    j.at("s").get_to(t.along_track);
    j.at("w").get_to(t.cross_track);
}

void to_json(json& j, const StepResult& r) {
    j = json{{"observation", r.observation},
             {"terminated", r.terminated},
             {"termination_reason", std::string(to_string(r.termination_reason))}};
}

void from_json(const json& j, StepResult& r) {
    j.at("observation").get_to(r.observation);
    j.at("terminated").get_to(r.terminated);
    r.termination_reason = termination_reason_from_string(j.at("termination_reason").get<std::string>());
}

Scenario parse_scenario(const std::string& text) {
    try {
        return json::parse(text).get<Scenario>();
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("invalid scenario JSON: {}", e.what()));
    }
}

std::string serialize_scenario(const Scenario& scenario) { return json(scenario).dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError(fmt::format("read error on '{}'", path.string()));
    }
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError(fmt::format("write error on '{}'", path.string()));
    }
}

std::vector<Scenario> read_scenarios(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        const json doc = json::parse(text);
        if (doc.is_array()) {
            return doc.get<std::vector<Scenario>>();
        }
        return {doc.get<Scenario>()};
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("{}: invalid scenario JSON: {}", path.string(), e.what()));
    }
}

std::vector<Scenario> read_scenario_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        return read_scenarios(dir);
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    for (const auto& f : files) {
        auto batch = read_scenarios(f);
        out.insert(out.end(), batch.begin(), batch.end());
    }
    return out;
}

void write_scenario(const std::filesystem::path& path, const Scenario& scenario) {
    write_text_file(path, serialize_scenario(scenario));
}

}  // namespace orbitpe
