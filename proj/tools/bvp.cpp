// bvp: batch front end for certifying and solving separated-BC problems.
//
//   bvp run --config problem.json [--out report.json] [--grid-size N] [--tol X]
//           [--task check|classify-curves|solve|probe ...]
//
// Exit codes: 0 all requested tasks passed, 1 a task failed, 2 configuration error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepbvp/errors.hpp"
#include "sepbvp/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Certify hypotheses and solve u'' + g(t) f(t,u) = 0 with separated boundary conditions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sepbvp::kToolName) + " " + sepbvp::kToolVersion);

    std::string config_path;
    std::string out_path;
    std::size_t grid_size = 0;
    double tol = 0.0;
    std::vector<std::string> tasks;

    CLI::App* run = app.add_subcommand("run", "Run the tasks of a problem config and write a JSON report");
    run->add_option("--config", config_path, "Problem config (JSON)")->required();
    run->add_option("--out", out_path, "Report path (overrides config output; '-' for stdout)");
    run->add_option("--grid-size", grid_size, "Number of grid nodes (odd, >= 3)");
    run->add_option("--tol", tol, "Quadrature tolerance");
    run->add_option("--task", tasks, "Tasks to run: check, classify-curves, solve, probe");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    sepbvp::RunConfig cfg;
    try {
        nlohmann::json doc;
        {
            std::ifstream in(config_path);
            if (!in) {
                throw sepbvp::ConfigError("", "cannot open config file " + config_path);
            }
            try {
                doc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw sepbvp::ConfigError("", "invalid JSON in " + config_path + ": " + e.what());
            }
        }
        if (doc.is_object()) {
            if (grid_size != 0) {
                doc["numerics"]["grid_size"] = grid_size;
            }
            if (tol != 0.0) {
                doc["numerics"]["quad_tol"] = tol;
            }
            if (!tasks.empty()) {
                doc["tasks"] = tasks;
            }
            if (!out_path.empty()) {
                doc["output"] = out_path;
            }
        }
        cfg = sepbvp::parse_config(doc);
    } catch (const sepbvp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    sepbvp::RunResult result;
    try {
        result = sepbvp::run(cfg);
    } catch (const sepbvp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const std::string text = result.report.dump(2) + "\n";
    if (cfg.output.empty() || cfg.output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(cfg.output);
        if (!out) {
            std::cerr << "cannot write report to " << cfg.output << "\n";
            return 1;
        }
        out << text;
    }
    for (const auto& [task, ok] : result.report["meta"]["tasks"].items()) {
        std::cerr << task << ": " << (ok.get<bool>() ? "pass" : "FAIL") << "\n";
    }
    return result.exit_code;
}
