#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "sepbvp/errors.hpp"
#include "sepbvp/run.hpp"

using namespace sepbvp;
using nlohmann::json;

namespace {

std::string config_path(const std::string& name) { return std::string(SEPBVP_CONFIG_DIR) + "/" + name; }
std::string data_path(const std::string& name) { return std::string(SEPBVP_TEST_DATA_DIR) + "/" + name; }

#ifdef SEPBVP_BVP_EXE
int run_cli(const std::string& args) {
    const std::string cmd = std::string(SEPBVP_BVP_EXE) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

std::string config_error_field(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

json smoke_doc() {
    return json::parse(R"({"problem": {"bc": [1, 0, 1, 0], "weight": "constant",
                           "nonlinearity": {"id": "constant", "value": 1}, "R": 1}})");
}

}  // namespace

TEST_CASE("parse_config reads the shipped configs") {
    const auto divisor = load_config(config_path("divisor_example.json"));
    CHECK(divisor.bc == std::array<double, 4>{1, 1, 1, 1});
    CHECK(divisor.weight.id == "inv-sqrt");
    CHECK(divisor.nonlinearity.id == "phi-example");
    CHECK(divisor.radius.auto_power);
    CHECK(divisor.radius.lambda == doctest::Approx(1.0 / 3.0));
    CHECK(divisor.tasks.size() == 4);

    const auto smoke = load_config(config_path("dirichlet_smoke.json"));
    CHECK_FALSE(smoke.radius.auto_power);
    CHECK(smoke.radius.value == 1.0);
    CHECK(smoke.numerics.grid_size == 129);
    CHECK(smoke.tasks == std::vector<Task>{Task::Check, Task::Solve});
}

TEST_CASE("configuration errors name the field") {
    CHECK_THROWS_AS(load_config(data_path("bad_alpha.json")), ConfigError);
    CHECK(config_error_field(json::parse(std::ifstream(data_path("bad_alpha.json")))) == "problem.bc[0] (alpha)");

    auto doc = smoke_doc();
    doc["problem"]["bc"] = {0, 1, 0, 1};
    CHECK(config_error_field(doc) == "problem.bc");
    doc = smoke_doc();
    doc["problem"]["R"] = -2;
    CHECK(config_error_field(doc) == "problem.R");
    doc = smoke_doc();
    doc["problem"]["R"] = "auto-power";
    CHECK(config_error_field(doc) == "problem.R");
    doc = smoke_doc();
    doc["numerics"]["grid_size"] = 64;
    CHECK(config_error_field(doc) == "numerics.grid_size");
    doc = smoke_doc();
    doc["numerics"]["quad_tol"] = 0;
    CHECK(config_error_field(doc) == "numerics.quad_tol");
    doc = smoke_doc();
    doc["numerics"]["bogus"] = 1;
    CHECK(config_error_field(doc) == "numerics.bogus");
    doc = smoke_doc();
    doc["tasks"] = json::array({"solve", "dance"});
    CHECK(config_error_field(doc) == "tasks");
    doc = smoke_doc();
    doc["problem"]["weight"] = "cosine";
    CHECK(config_error_field(doc) == "problem.weight.id");
    doc = smoke_doc();
    doc["problem"].erase("nonlinearity");
    CHECK(config_error_field(doc) == "problem.nonlinearity");
    doc = smoke_doc();
    doc["problem"]["weight"] = "inv-sqrt";
    doc["problem"]["nonlinearity"] = {{"id", "phi-example"}, {"lambda", 1.5}};
    CHECK(config_error_field(doc) == "problem.nonlinearity.lambda");

    try {
        load_config(data_path("bad_syntax.json"));
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

#ifdef SEPBVP_BVP_EXE
TEST_CASE("cli exit codes") {
    CHECK(run_cli("run --config " + data_path("bad_alpha.json")) == 2);
    CHECK(run_cli("run --config " + data_path("bad_syntax.json")) == 2);
    CHECK(run_cli("run --config /nonexistent.json") == 2);
    CHECK(run_cli("run") == 2);
    CHECK(run_cli("run --config " + config_path("dirichlet_smoke.json") + " --grid-size 64") == 2);

    const auto out = std::filesystem::temp_directory_path() / "sepbvp_cli_smoke.json";
    CHECK(run_cli("run --config " + config_path("dirichlet_smoke.json") + " --out " + out.string()) == 0);
    const json report = json::parse(std::ifstream(out));
    CHECK(report["bounds"]["m1"].get<double>() == doctest::Approx(0.125).epsilon(1e-10));
    std::filesystem::remove(out);

    // Overrides reach the run.
    CHECK(run_cli("run --config " + config_path("dirichlet_smoke.json") + " --grid-size 33 --tol 1e-9 --task check --out " +
                  out.string()) == 0);
    const json small = json::parse(std::ifstream(out));
    CHECK(small["config"]["numerics"]["grid_size"] == 33);
    CHECK(small["config"]["numerics"]["quad_tol"] == 1e-9);
    CHECK(small["solution"].is_null());
    std::filesystem::remove(out);

    // A task failure: the ball is too small for Tu when f = 5.
    auto doc = smoke_doc();
    doc["problem"]["nonlinearity"]["value"] = 5;
    doc["tasks"] = json::array({"solve"});
    const auto bad = std::filesystem::temp_directory_path() / "sepbvp_cli_fail.json";
    std::ofstream(bad) << doc.dump();
    CHECK(run_cli("run --config " + bad.string() + " --out -") == 1);
    std::filesystem::remove(bad);
}
#endif

TEST_CASE("Dirichlet smoke report") {
    const auto res = run(load_config(config_path("dirichlet_smoke.json")));
    CHECK(res.exit_code == 0);
    const auto& r = res.report;
    for (const char* key : {"config", "hypotheses", "bounds", "solution", "meta"}) {
        CHECK(r.contains(key));
    }
    CHECK(std::abs(r["bounds"]["m1"].get<double>() - 0.125) <= 1e-10);
    CHECK(std::abs(r["bounds"]["m2"].get<double>() - 0.5) <= 1e-10);
    CHECK(r["solution"]["residual"].get<double>() <= 1e-8);
    CHECK(r["solution"]["converged"] == true);
    CHECK(r["solution"]["t"].size() == 129);
    CHECK(r["solution"]["u"].size() == 129);
    CHECK(r["solution"]["du"].size() == 129);
    CHECK(r["meta"]["tool"] == "bvp");
    CHECK(r["meta"]["tasks"]["check"] == true);
    CHECK(r["meta"]["tasks"]["solve"] == true);
}

TEST_CASE("divisor example report") {
    const auto res = run(load_config(config_path("divisor_example.json")));
    CHECK(res.exit_code == 0);
    const auto& r = res.report;
    CHECK(std::abs(r["bounds"]["m_total"].get<double>() - 2.336) <= 0.005);
    CHECK(r["meta"]["radius"] == 4.0);
    CHECK(r["meta"]["radius_mode"] == "auto-power");
    REQUIRE(r["curves"].size() == 16);
    for (const auto& c : r["curves"]) {
        CHECK(c["verdict"] == "Inviable_upper");
    }
    CHECK(r["solution"]["converged"] == true);
    CHECK(r["hypotheses"]["h3"]["R"] == 4.0);
    CHECK(r.contains("probe"));
}

TEST_CASE("config round-trips through the report") {
    for (const char* name : {"divisor_example.json", "dirichlet_smoke.json", "step_dirichlet.json"}) {
        const auto cfg = load_config(config_path(name));
        const json echoed = config_to_json(cfg);
        const auto again = parse_config(echoed);
        CHECK(config_to_json(again) == echoed);
        CHECK(again.bc == cfg.bc);
        CHECK(again.tasks == cfg.tasks);
        CHECK(again.radius.auto_power == cfg.radius.auto_power);
    }
    const auto res = run(load_config(config_path("dirichlet_smoke.json")));
    CHECK(config_to_json(parse_config(res.report["config"])) == res.report["config"]);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
    const auto cfg = load_config(config_path("divisor_example.json"));
    const auto a = run(cfg).report;
    const auto b = run(cfg).report;
    CHECK(a["meta"].contains("timestamp"));
    CHECK(strip_timestamp(a).dump() == strip_timestamp(b).dump());
    CHECK_FALSE(strip_timestamp(a)["meta"].contains("timestamp"));
}
