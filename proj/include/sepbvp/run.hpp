#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sepbvp/model.hpp"

namespace sepbvp {

inline constexpr const char* kToolName = "bvp";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Task { Check, ClassifyCurves, Solve, Probe };

std::string to_string(Task t);
/// Throws ConfigError for unknown names.
Task task_from_string(const std::string& name);

/// A catalog entry: id plus its parameters as given in the config.
struct CatalogRef {
    std::string id;
    nlohmann::json params = nlohmann::json::object();
};

struct RadiusSpec {
    bool auto_power = false;
    double value = 1.0;    ///< used when !auto_power
    double lambda = 0.0;   ///< used when auto_power
};

struct Numerics {
    std::size_t grid_size = 129;
    double quad_tol = 1e-10;
    double solver_tol = 1e-10;
    std::size_t max_iter = 200;
    double relax = 1.0;
    double t_min = 1e-6;
    double probe_eps = 1e-3;
    std::size_t probe_samples = 9;
    std::size_t classify_n_t = 257;
    std::size_t classify_n_y = 33;
};

struct RunConfig {
    std::array<double, 4> bc{1.0, 0.0, 1.0, 0.0};
    CatalogRef weight{"constant", nlohmann::json::object()};
    CatalogRef nonlinearity{"constant", nlohmann::json::object()};
    RadiusSpec radius;
    Numerics numerics;
    std::vector<Task> tasks{Task::Check, Task::ClassifyCurves, Task::Solve};
    std::string output;
};

/// Throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a config file; JSON syntax errors carry line/column.
RunConfig load_config(const std::string& path);
/// Canonical form; parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const RunConfig& c);

/// Assembles the problem. For auto-power radius the returned spec carries a
/// placeholder radius; run() replaces it.
ProblemSpec build_spec(const RunConfig& c);

struct RunResult {
    nlohmann::json report;
    int exit_code = 0;   ///< 0 all tasks passed, 1 some task failed
};

/// Executes tasks in the order check, classify-curves, solve, probe. Task failures
/// are recorded in the report; configuration problems throw ConfigError.
RunResult run(const RunConfig& c);

/// Same report with meta.timestamp removed.
nlohmann::json strip_timestamp(nlohmann::json report);

}  // namespace sepbvp
