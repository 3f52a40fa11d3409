#pragma once

#include "orbitpe/environment.hpp"
#include "orbitpe/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace nlohmann {

template <>
struct adl_serializer<Eigen::Vector3d> {
    static void to_json(json& j, const Eigen::Vector3d& v) { j = json::array({v.x(), v.y(), v.z()}); }
    static void from_json(const json& j, Eigen::Vector3d& v) {
        if (!j.is_array() || j.size() != 3) {
            throw json::type_error::create(302, "expected a 3-element array", &j);
        }
        v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    }
};

}  // namespace nlohmann

namespace orbitpe {

using json = nlohmann::json;

// Field names follow the interchange formats: elements use {a, e, i, raan, argp, nu}.
void to_json(json& j, const BodyConstants& b);
void from_json(const json& j, BodyConstants& b);
void to_json(json& j, const OrbitalElements& el);
void from_json(const json& j, OrbitalElements& el);
void to_json(json& j, const ScenarioConstraints& c);
void from_json(const json& j, ScenarioConstraints& c);
void to_json(json& j, const Scenario& s);
void from_json(const json& j, Scenario& s);
void to_json(json& j, const ConstraintReport& r);
void to_json(json& j, const Observation& o);
void from_json(const json& j, Observation& o);
void to_json(json& j, const ThrottleVector& t);
void from_json(const json& j, ThrottleVector& t);
void to_json(json& j, const StepResult& r);
void from_json(const json& j, StepResult& r);

/// Parses a scenario document; FormatError with the offending field on failure.
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& scenario);

/// Reads a file holding either one scenario object or an array of them.
std::vector<Scenario> read_scenarios(const std::filesystem::path& path);
/// Reads every *.json scenario file in a directory, sorted by file name.
std::vector<Scenario> read_scenario_dir(const std::filesystem::path& dir);
void write_scenario(const std::filesystem::path& path, const Scenario& scenario);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace orbitpe
