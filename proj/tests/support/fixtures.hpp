#pragma once

#include "orbitpe/episode_log.hpp"
#include "orbitpe/scenario.hpp"

#include <initializer_list>
#include <string>
#include <utility>

namespace fixture {

inline orbitpe::Scenario default_scenario(std::uint64_t seed) {
    return orbitpe::sample_scenario(orbitpe::default_evader_elements(), {}, seed);
}

/// Log with the given (t, range) samples and otherwise blank records.
inline orbitpe::EpisodeLog ranges_log(std::initializer_list<std::pair<double, double>> samples,
                                      std::string id = "synthetic") {
    orbitpe::EpisodeLog log;
    log.id = std::move(id);
    for (const auto& [t, range] : samples) {
        orbitpe::StepRecord r;
        r.t = t;
        r.range = range;
        r.agent.verbal = "coast";
        log.steps.push_back(r);
    }
    return log;
}

}  // namespace fixture

#include <atomic>
#include <filesystem>
#include <unistd.h>

namespace fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("orbitpe-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace fixture
