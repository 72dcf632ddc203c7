#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "erdy/config.hpp"

namespace fs = std::filesystem;

namespace {

struct run_result {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() /
                 ("erdy_cli_" + std::to_string(static_cast<unsigned>(::getpid())));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

run_result run_cli(const std::string& args) {
    const char* bin = std::getenv("ERDY_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "ERDY_BIN must point at the built binary");
    const auto out_file = work_dir() / "stdout.txt";
    const auto err_file = work_dir() / "stderr.txt";
    const std::string cmd = std::string(bin) + " " + args + " > " + out_file.string() +
                            " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    run_result res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_file);
    res.err = slurp(err_file);
    return res;
}

// csv helper: data rows only (comment + header skipped)
std::vector<std::vector<double>> csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

int csv_data_line_count(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    int count = -1; // skip the header
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++count;
    return count;
}

std::string strip_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto cut = line.rfind(',');
        out << (cut == std::string::npos ? line : line.substr(0, cut)) << "\n";
    }
    return out.str();
}

const std::string triangle_config = R"({
    "graph": {"n": 3, "p": 1.0, "weights": {"type": "constant", "value": 1.0}, "seed": 5}
})";

const std::string sim_config = R"({
    "model": {"type": "sis", "parameters": {"beta": 2.0, "gamma": 1.0}},
    "graph": {"n": 60, "p": 0.4, "weights": {"type": "unit"}, "seed": 11},
    "dynamics": {"horizon": 1.0, "u0": [0.8, 0.2], "sample_points": 5}
})";

} // namespace

TEST_CASE("graph-gen writes the expected edge list and is reproducible") {
    const auto cfg = work_dir() / "triangle.json";
    spit(cfg, triangle_config);
    const auto out = work_dir() / "triangle.txt";

    const auto res = run_cli("graph-gen -c " + cfg.string() + " -o " + out.string());
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("n 3") != std::string::npos);
    CHECK(res.out.find("edges 3") != std::string::npos);
    CHECK(res.out.find("mean_degree 2") != std::string::npos);

    const auto first = slurp(out);
    CHECK(first.rfind("# erdy-meanfield config-v1", 0) == 0);
    int edge_lines = 0;
    std::istringstream lines(first);
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '#' && line[0] != 'N') ++edge_lines;
    CHECK(edge_lines == 3);

    const auto res2 = run_cli("graph-gen -c " + cfg.string() + " -o " + out.string());
    CHECK(res2.exit_code == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("missing required keys exit with code 2 and name the key") {
    const auto cfg = work_dir() / "no_n.json";
    spit(cfg, R"({"graph": {"p": 1.0, "seed": 5}})");
    const auto res = run_cli("graph-gen -c " + cfg.string() + " -o " +
                             (work_dir() / "x.txt").string());
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("\"n\"") != std::string::npos);
}

TEST_CASE("unknown config keys exit with code 2") {
    const auto cfg = work_dir() / "typo.json";
    spit(cfg, R"({"graph": {"n": 3, "p": 1.0, "sede": 5}})");
    const auto res = run_cli("graph-gen -c " + cfg.string() + " -o " +
                             (work_dir() / "y.txt").string());
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("sede") != std::string::npos);
}

TEST_CASE("simulate honours the sample grid and stays put from an absorbing start") {
    const auto cfg = work_dir() / "absorbing.json";
    spit(cfg, R"({
        "model": {"type": "sis", "parameters": {"beta": 2.0, "gamma": 1.0}},
        "graph": {"n": 40, "p": 0.5, "weights": {"type": "unit"}, "seed": 3},
        "dynamics": {"horizon": 1.0, "u0": [1.0, 0.0], "sample_points": 5}
    })");
    const auto dir = work_dir() / "absorbing_out";
    const auto res = run_cli("simulate -c " + cfg.string() + " -o " + dir.string());
    CHECK(res.exit_code == 0);
    const auto rows = csv_rows(dir / "trajectory.csv");
    REQUIRE(rows.size() == 5);
    for (std::size_t g = 0; g < 5; ++g) {
        CHECK(rows[g][0] == 0.25 * static_cast<double>(g));
        CHECK(rows[g][1] == 1.0);
        CHECK(rows[g][2] == 0.0);
    }
}

TEST_CASE("simulate rerun is byte-identical, and --sample-points overrides") {
    const auto cfg = work_dir() / "sim.json";
    spit(cfg, sim_config);
    const auto dir_a = work_dir() / "sim_a";
    const auto dir_b = work_dir() / "sim_b";
    CHECK(run_cli("simulate -c " + cfg.string() + " -o " + dir_a.string()).exit_code == 0);
    CHECK(run_cli("simulate -c " + cfg.string() + " -o " + dir_b.string()).exit_code == 0);
    CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
    CHECK(slurp(dir_a / "events.txt") == slurp(dir_b / "events.txt"));
    CHECK(slurp(dir_a / "diagnostics.txt") == slurp(dir_b / "diagnostics.txt"));
    CHECK(csv_rows(dir_a / "trajectory.csv").size() == 5);

    const auto dir_c = work_dir() / "sim_c";
    CHECK(run_cli("simulate -c " + cfg.string() + " -o " + dir_c.string() +
                  " --sample-points 9")
              .exit_code == 0);
    CHECK(csv_rows(dir_c / "trajectory.csv").size() == 9);
}

TEST_CASE("solve-mf reproduces the logistic curve") {
    const auto cfg = work_dir() / "mf.json";
    spit(cfg, R"({
        "model": {"type": "sis", "parameters": {"beta": 2.0, "gamma": 1.0}},
        "dynamics": {"horizon": 5.0, "u0": [0.9, 0.1], "sample_points": 101}
    })");
    const auto dir = work_dir() / "mf_out";
    const auto res = run_cli("solve-mf -c " + cfg.string() + " -o " + dir.string());
    CHECK(res.exit_code == 0);
    const auto rows = csv_rows(dir / "meanfield.csv");
    REQUIRE(rows.size() == 101);
    for (const auto& row : rows) {
        const double expected = 0.5 / (1.0 + 4.0 * std::exp(-row[0]));
        CHECK(std::abs(row[2] - expected) < 1e-6);
    }
    // rerun byte-identical
    const auto dir2 = work_dir() / "mf_out2";
    CHECK(run_cli("solve-mf -c " + cfg.string() + " -o " + dir2.string()).exit_code == 0);
    CHECK(slurp(dir / "meanfield.csv") == slurp(dir2 / "meanfield.csv"));
}

TEST_CASE("solve-nimfa needs --graph and matches solve-mf on the complete graph") {
    const auto cfg = work_dir() / "nimfa.json";
    spit(cfg, R"({
        "model": {"type": "sis", "parameters": {"beta": 2.0, "gamma": 1.0}},
        "graph": {"n": 40, "p": 1.0, "weights": {"type": "unit"}, "seed": 2},
        "dynamics": {"horizon": 2.0, "u0": [0.8, 0.2], "sample_points": 41,
                     "abs_tol": 1e-11, "rel_tol": 1e-10}
    })");
    CHECK(run_cli("solve-nimfa -c " + cfg.string()).exit_code == 2);

    const auto gpath = work_dir() / "complete40.txt";
    CHECK(run_cli("graph-gen -c " + cfg.string() + " -o " + gpath.string()).exit_code == 0);
    const auto ndir = work_dir() / "nimfa_out";
    CHECK(run_cli("solve-nimfa -c " + cfg.string() + " --graph " + gpath.string() + " -o " +
                  ndir.string())
              .exit_code == 0);
    const auto mdir = work_dir() / "nimfa_mf_out";
    CHECK(run_cli("solve-mf -c " + cfg.string() + " -o " + mdir.string()).exit_code == 0);

    const auto y = csv_rows(ndir / "nimfa.csv");
    const auto u = csv_rows(mdir / "meanfield.csv");
    REQUIRE(y.size() == u.size());
    for (std::size_t g = 0; g < y.size(); ++g) {
        REQUIRE(y[g][0] == u[g][0]);
        CHECK(std::abs(y[g][1] - u[g][1]) + std::abs(y[g][2] - u[g][2]) <= 1e-8);
    }

    // per-vertex dump gated behind the flag
    CHECK_FALSE(fs::exists(ndir / "nimfa_z.csv"));
    CHECK(run_cli("solve-nimfa -c " + cfg.string() + " --graph " + gpath.string() + " -o " +
                  ndir.string() + " --dump-z")
              .exit_code == 0);
    CHECK(fs::exists(ndir / "nimfa_z.csv"));
}

TEST_CASE("study emits one row per task and is worker-count independent") {
    const auto cfg = work_dir() / "study.json";
    spit(cfg, R"({
        "model": {"type": "sis", "parameters": {"beta": 2.0, "gamma": 1.0}},
        "graph": {"p": 0.3, "weights": {"type": "unit"}},
        "dynamics": {"horizon": 1.0, "u0": [0.8, 0.2], "sample_points": 30},
        "study": {"ladder": [50], "replications": 1, "master_seed": 4,
                  "diagnostics": {"r2": "exact"}}
    })");
    const auto dir1 = work_dir() / "study_w1";
    const auto dir4 = work_dir() / "study_w4";
    CHECK(run_cli("study -c " + cfg.string() + " -o " + dir1.string() + " --workers 1")
              .exit_code == 0);
    CHECK(run_cli("study -c " + cfg.string() + " -o " + dir4.string() + " --workers 4")
              .exit_code == 0);

    const auto rows1 = slurp(dir1 / "rows.csv");
    CHECK(strip_last_column(rows1) == strip_last_column(slurp(dir4 / "rows.csv")));
    CHECK(slurp(dir1 / "aggregates.csv").find("sup_err_x") != std::string::npos);
    CHECK(csv_data_line_count(dir1 / "rows.csv") == 1);
    CHECK(fs::exists(dir1 / "slopes.txt"));
}

TEST_CASE("a single-vertex graph file drives a recovery run") {
    // sampling requires n >= 2, so the lone-vertex case goes through an
    // explicit edge-list file
    const auto gpath = work_dir() / "lone.txt";
    spit(gpath, "N 1\n");
    const auto cfg = work_dir() / "lone.json";
    spit(cfg, R"({
        "model": {"type": "sis", "parameters": {"beta": 2.0, "gamma": 1.0}},
        "dynamics": {"horizon": 1.0, "init": [1], "sample_points": 3}
    })");
    const auto dir = work_dir() / "lone_out";
    const auto res = run_cli("simulate -c " + cfg.string() + " --graph " + gpath.string() +
                             " -o " + dir.string());
    CHECK(res.exit_code == 0);
    const auto rows = csv_rows(dir / "trajectory.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][2] == 1.0); // starts infected
    for (const auto& row : rows) CHECK(row[1] + row[2] == 1.0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("study").exit_code == 2);            // missing --config
    CHECK(run_cli("frobnicate").exit_code == 2);       // unknown subcommand
    const auto res = run_cli("--help");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("graph-gen") != std::string::npos);

    const auto sim_help = run_cli("simulate --help");
    CHECK(sim_help.exit_code == 0);
    CHECK(sim_help.out.find("--sample-points") != std::string::npos);
    CHECK(sim_help.out.find("--graph") != std::string::npos);
    const auto study_help = run_cli("study --help");
    CHECK(study_help.exit_code == 0);
    CHECK(study_help.out.find("--workers") != std::string::npos);
    CHECK(study_help.out.find("ERDY_WORKERS") != std::string::npos);
}

TEST_CASE("shipped configs stay parseable") {
    const char* dir = std::getenv("ERDY_CONFIG_DIR");
    REQUIRE_MESSAGE(dir != nullptr, "ERDY_CONFIG_DIR must point at configs/");
    for (const auto& name : {"canonical_sis_study.json", "ci_sis_study.json",
                             "sis_simulate.json", "mf_logistic.json"}) {
        const auto cfg = erdy::parse_config_file((fs::path(dir) / name).string());
        CHECK(cfg.model != nullptr);
        CHECK(cfg.dynamics.has_value());
    }
    // the simulate demo materializes full graph parameters
    const auto sim = erdy::parse_config_file((fs::path(dir) / "sis_simulate.json").string());
    CHECK(sim.graph_parameters().n == 500);
}
