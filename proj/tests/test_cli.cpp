#include "radopt/config.hpp"
#include "radopt/csv.hpp"
#include "radopt/errors.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace radopt;
namespace fs = std::filesystem;

namespace {

const char* kBaseConfig = R"json({
  "domain":    {"dim": 1, "extents": [1.0], "resolutions": [16]},
  "diffusion": {"kind": "constant", "sigma": 0.1},
  "velocity":  {"q_expr": ["0.5*x*(1-x)"], "amplitude_A": 1.0,
                "boundary_policy": "require_tangential"},
  "reaction":  {"name": "logistic"},
  "time":      {"T": 0.2, "dt_target": 0.005},
  "constraint": {"m": 0.5},
  "optimizer": {"max_iters": 40, "multistart_k": 2, "seed": 4, "stop_tol": 3e-5},
  "output":    {"dir": "OUTDIR", "snapshots": 2}
})json";

fs::path sandbox() {
    fs::path dir = fs::temp_directory_path() / "radopt_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
    fs::path p = dir / "scenario.json";
    std::ofstream out(p);
    out << body;
    return p.string();
}

std::string with_outdir(const fs::path& dir) {
    std::string body = kBaseConfig;
    std::string out = (dir / "out").string();
    body.replace(body.find("OUTDIR"), 6, out);
    return body;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(RADOPT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config loading: happy path and strict key checking") {
    fs::path dir = sandbox();
    LoadedConfig cfg = parse_config_text(with_outdir(dir));
    CHECK(cfg.grid.cell_count() == 16);
    CHECK(cfg.mass_m == 0.5);
    CHECK(cfg.opt.multistart_k == 2);
    CHECK(cfg.config_hash.size() == 16);

    // unknown key anywhere is an error
    std::string bad = with_outdir(dir);
    bad.replace(bad.find("\"sigma\""), 7, "\"sgima\"");
    CHECK_THROWS_AS(parse_config_text(bad), ConfigError);

    std::string extra = with_outdir(dir);
    extra.insert(extra.rfind('}'), ", \"plotting\": {}");
    CHECK_THROWS_AS(parse_config_text(extra), ConfigError);

    // missing required section
    CHECK_THROWS_AS(parse_config_text("{}"), ConfigError);

    // malformed JSON carries a line anchor
    try {
        parse_config_text("{\n  \"domain\": [,]\n}");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("config validation errors") {
    fs::path dir = sandbox();
    std::string body = with_outdir(dir);

    std::string neg_m = body;
    neg_m.replace(neg_m.find("\"m\": 0.5"), 8, "\"m\": -1");
    CHECK_THROWS_AS(parse_config_text(neg_m), ConfigError);

    std::string bad_policy = body;
    bad_policy.replace(bad_policy.find("require_tangential"), 18, "sideways");
    CHECK_THROWS_AS(parse_config_text(bad_policy), ConfigError);

    std::string bad_expr = body;
    bad_expr.replace(bad_expr.find("0.5*x*(1-x)"), 11, "0.5*x*(1-x");
    CHECK_THROWS_AS(parse_config_text(bad_expr), ConfigError);
}

TEST_CASE("cli simulate writes outputs and exits 0") {
    fs::path dir = sandbox();
    std::string cfg = write_config(dir, with_outdir(dir));
    CHECK(run_cli("simulate --config " + cfg) == 0);
    CHECK(fs::exists(dir / "out" / "trajectory.csv"));
    CHECK(fs::exists(dir / "out" / "final_state.csv"));
    CHECK(fs::exists(dir / "out" / "budget_report.txt"));
    CHECK(fs::exists(dir / "out" / "state_000020.csv"));

    std::string report = slurp(dir / "out" / "budget_report.txt");
    CHECK(report.find("config_hash = ") != std::string::npos);
    CHECK(report.find("require_tangential") != std::string::npos);

    std::string traj = slurp(dir / "out" / "trajectory.csv");
    CHECK(traj.rfind("t,mass,advection_contrib,reaction_contrib,boundary_flux\n", 0) == 0);
}

TEST_CASE("cli simulate: identical config and seed give identical bytes") {
    fs::path dir = sandbox();
    std::string cfg = write_config(dir, with_outdir(dir));
    REQUIRE(run_cli("simulate --config " + cfg) == 0);
    std::string first = slurp(dir / "out" / "trajectory.csv");
    std::string first_state = slurp(dir / "out" / "final_state.csv");
    REQUIRE(run_cli("simulate --config " + cfg) == 0);
    CHECK(slurp(dir / "out" / "trajectory.csv") == first);
    CHECK(slurp(dir / "out" / "final_state.csv") == first_state);
}

TEST_CASE("cli exit codes for bad inputs") {
    fs::path dir = sandbox();

    // malformed config -> 2
    fs::path bad = dir / "broken.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("simulate --config " + bad.string()) == 2);

    // missing file -> 2
    CHECK(run_cli("simulate --config " + (dir / "nope.json").string()) == 2);

    // u0 violating the box constraint -> 2
    std::string cfg = write_config(dir, with_outdir(dir));
    fs::path u0 = dir / "u0.csv";
    {
        std::ofstream out(u0);
        out << "u0\n";
        for (int i = 0; i < 16; ++i) out << (i == 3 ? "1.7\n" : "0.5\n");
    }
    CHECK(run_cli("simulate --config " + cfg + " --u0 " + u0.string()) == 2);

    // u0 with the wrong cell count -> 2
    {
        std::ofstream out(u0);
        out << "u0\n0.5\n0.5\n";
    }
    CHECK(run_cli("simulate --config " + cfg + " --u0 " + u0.string()) == 2);
}

TEST_CASE("initial datum CSV roundtrip feeds simulate") {
    fs::path dir = sandbox();
    std::string cfg = write_config(dir, with_outdir(dir));
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{16});
    InitialDatum u0 = random_admissible(6, 0.5, g);
    fs::path path = dir / "u0.csv";
    save_datum_csv(path.string(), u0);
    InitialDatum back = load_datum_csv(path.string(), g);
    CHECK(back.field.values == u0.field.values);
    CHECK(run_cli("simulate --config " + cfg + " --u0 " + path.string()) == 0);
}

TEST_CASE("optimize outputs are byte-identical across runs") {
    fs::path dir = sandbox();
    std::string cfg = write_config(dir, with_outdir(dir));
    REQUIRE(run_cli("optimize --config " + cfg) == 0);
    std::string u0 = slurp(dir / "out" / "optimal_u0.csv");
    std::string trace = slurp(dir / "out" / "trace.csv");
    std::string cluster = slurp(dir / "out" / "cluster_report.txt");
    REQUIRE(run_cli("optimize --config " + cfg) == 0);
    CHECK(slurp(dir / "out" / "optimal_u0.csv") == u0);
    CHECK(slurp(dir / "out" / "trace.csv") == trace);
    CHECK(slurp(dir / "out" / "cluster_report.txt") == cluster);
    CHECK(fs::exists(dir / "out" / "gradient.csv"));
}

TEST_CASE("cli optimize: exit 0 with monotone trace, exit 4 when nothing converges") {
    fs::path dir = sandbox();
    std::string cfg = write_config(dir, with_outdir(dir));
    CHECK(run_cli("optimize --config " + cfg + " --direction max") == 0);
    CHECK(fs::exists(dir / "out" / "optimal_u0.csv"));
    CHECK(fs::exists(dir / "out" / "trace.csv"));
    CHECK(fs::exists(dir / "out" / "cluster_report.txt"));

    std::string trace = slurp(dir / "out" / "trace.csv");
    CHECK(trace.rfind("iter,value,residual,step_size\n", 0) == 0);

    // min direction labels the heuristic bound
    CHECK(run_cli("optimize --config " + cfg + " --direction min") == 0);
    std::string cluster = slurp(dir / "out" / "cluster_report.txt");
    CHECK(cluster.find("heuristic upper bound on the infimum") != std::string::npos);

    // strangle the iteration budget: forced non-convergence -> 4
    std::string hard = with_outdir(dir);
    hard.replace(hard.find("\"max_iters\": 40"), 15, "\"max_iters\": 1");
    std::string hard_cfg = write_config(dir, hard);
    CHECK(run_cli("optimize --config " + hard_cfg) == 4);
}

TEST_CASE("cli enhance: verdict exit codes and stamped report") {
    fs::path dir = sandbox();

    // alpha >= 0 (tangential parabola): threshold error -> exit 2
    std::string cfg = write_config(dir, with_outdir(dir));
    CHECK(run_cli("enhance --config " + cfg) == 2);

    // drain field q = -x with the relaxed policy: report written, exit 0 or 5
    std::string drain = with_outdir(dir);
    drain.replace(drain.find("0.5*x*(1-x)"), 11, "-x");
    drain.replace(drain.find("require_tangential"), 18, "allow_nonzero_normal");
    drain.replace(drain.find("\"amplitude_A\": 1.0"), 18, "\"amplitude_A\": 4.0");
    std::string drain_cfg = write_config(dir, drain);
    int rc = run_cli("enhance --config " + drain_cfg);
    CHECK((rc == 0 || rc == 5));
    CHECK(fs::exists(dir / "out" / "enhancement_report.txt"));
    CHECK(fs::exists(dir / "out" / "enhancement_sweep.csv"));

    std::string report = slurp(dir / "out" / "enhancement_report.txt");
    CHECK(report.find("policy_note = ") != std::string::npos);
    CHECK(report.find("config_hash = ") != std::string::npos);
    CHECK(report.find("A_threshold = 2") != std::string::npos);
    bool holds = report.find("inequality_holds = yes") != std::string::npos;
    CHECK(holds == (rc == 0)); // exit code encodes the verdict
}

TEST_CASE("csv state export shapes") {
    Grid g2 = build_grid(2, std::vector<double>{1.0, 1.0}, std::vector<int>{3, 2});
    ScalarField f(g2, 0.25);
    fs::path dir = sandbox();
    fs::path p = dir / "state.csv";
    save_state_csv(p.string(), f, "u");
    std::string body = slurp(p);
    CHECK(body.rfind("x,y,u\n", 0) == 0);
    int lines = 0;
    for (char c : body)
        if (c == '\n') ++lines;
    CHECK(lines == 7); // header + 6 cells
}
