#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// End-to-end checks of the command-line tool. Each case shells out to the
// built binary; stdout is captured through popen.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string command = std::string(ETALON_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    size_t n;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) result.output.append(buffer, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/etalon_cli_test_") + name;
}

}  // namespace

TEST_CASE("loss command") {
    SUBCASE("simple model, experiment parameters") {
        const RunResult r = run(
            "loss --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 --theta-mrad 2 --model simple "
            "--format json");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.output);
        CHECK(j["delta"].get<double>() == doctest::Approx(0.02988475691).epsilon(1e-8));
        CHECK(j["loss"].get<double>() == doctest::Approx(4.7163095e-4).epsilon(1e-6));
        CHECK(j["eta"].get<double>() == doctest::Approx(-0.0066792).epsilon(1e-4));
    }
    SUBCASE("zero tilt means zero loss") {
        const RunResult r = run(
            "loss --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 --theta-mrad 0 --model simple "
            "--format json");
        REQUIRE(r.exit_code == 0);
        CHECK(nlohmann::json::parse(r.output)["loss"].get<double>() == 0.0);
    }
    SUBCASE("series and optimized agree at small walk-off") {
        const std::string base = "loss --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 --theta-mrad 2 ";
        const auto series = nlohmann::json::parse(run(base + "--model series --format json").output);
        const auto optim =
            nlohmann::json::parse(run(base + "--model optimized --format json").output);
        const double ls = series["loss"].get<double>();
        const double lo = optim["loss"].get<double>();
        CHECK(std::abs(ls - lo) <= 0.02 * lo);
        CHECK(series["converged"].get<bool>());
    }
    SUBCASE("invalid reflectivity exits with the validation code") {
        const RunResult r =
            run("loss --R 1.2 --n 1.447 --d-mm 4 --w0-um 370 --theta-mrad 2");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("unknown model exits with the validation code") {
        const RunResult r =
            run("loss --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 --theta-mrad 2 --model foo");
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("sweep command") {
    const std::string out = temp_path("sweep.csv");
    const std::string args = "sweep --R 0.27 --delta-min 0.01 --delta-max 2 --points 25 "
                             "--n 1.447 --no-timestamp -o " + out;

    REQUIRE(run(args).exit_code == 0);
    const std::string first = read_file(out);
    REQUIRE(run(args).exit_code == 0);
    CHECK(first == read_file(out));  // byte-identical reruns

    // parse the loss column and check it never decreases
    std::istringstream lines(first);
    std::string line;
    bool header_seen = false;
    double previous = -1.0;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            CHECK(line == "delta,eta_opt,loss_opt,converged,eta_sim");
            header_seen = true;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double delta, eta, loss, eta_sim;
        int converged;
        REQUIRE((fields >> delta >> eta >> loss >> converged >> eta_sim));
        CHECK(converged == 1);
        CHECK(loss >= previous);
        previous = loss;
        ++rows;
    }
    CHECK(rows == 25);

    SUBCASE("multiple reflectivities fan out into suffixed files") {
        const std::string stem = temp_path("multi.csv");
        REQUIRE(run("sweep --R 0.1 --R 0.5 --delta-min 0.1 --delta-max 1 --points 4 "
                    "--no-timestamp -o " + stem).exit_code == 0);
        CHECK(read_file(temp_path("multi_R0.1.csv")).find("reflectivity = 0.1") !=
              std::string::npos);
        CHECK(read_file(temp_path("multi_R0.5.csv")).find("reflectivity = 0.5") !=
              std::string::npos);
    }
}

TEST_CASE("design-table command") {
    SUBCASE("matches the frozen golden file") {
        const std::string out = temp_path("table.csv");
        REQUIRE(run("design-table --no-timestamp -o " + out).exit_code == 0);
        CHECK(read_file(out) ==
              read_file(std::string(ETALON_FIXTURES_DIR) + "/design_table_golden.csv"));
    }
    SUBCASE("explicit database file gives the same table") {
        const std::string out = temp_path("table_file.csv");
        REQUIRE(run("design-table --no-timestamp -m " + std::string(ETALON_DATA_DIR) +
                    "/materials.txt -o " + out).exit_code == 0);
        CHECK(read_file(out) ==
              read_file(std::string(ETALON_FIXTURES_DIR) + "/design_table_golden.csv"));
    }
    SUBCASE("recommendation listing") {
        const RunResult r = run("design-table --recommend fused_silica --no-timestamp");
        REQUIRE(r.exit_code == 0);
        std::istringstream lines(r.output);
        std::string line, first_row;
        while (std::getline(lines, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("rank,", 0) == 0) continue;
            first_row = line;
            break;
        }
        CHECK(first_row.rfind("1,fused_silica,Ta2O5,", 0) == 0);
    }
    SUBCASE("unknown substrate fails validation") {
        CHECK(run("design-table --recommend unobtainium").exit_code == 2);
    }
    SUBCASE("json output parses") {
        const RunResult r = run("design-table --format json --no-timestamp");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.output);
        CHECK(j["rows"].size() == 28);
    }
}

TEST_CASE("tune command") {
    const RunResult r = run(
        "tune --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 --lambda-nm 1342 "
        "--psat-W 44 --g0 0.11 --tout 0.035 --l0 0.0213 --theta-max-mrad 12 --points 25 "
        "--format json --no-timestamp");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["min_tilt_mrad"].get<double>() == doctest::Approx(1.1545).epsilon(1e-3));
    REQUIRE(j["rows"].size() == 25);
    int excluded = 0;
    for (const auto& row : j["rows"]) {
        CHECK(row["power_optimized_W"].get<double>() >= row["power_simple_W"].get<double>());
        if (row["below_min_tilt"].get<bool>()) ++excluded;
        if (std::abs(row["theta_mrad"].get<double>()) <= 1.154)
            CHECK(row["below_min_tilt"].get<bool>());
    }
    CHECK(excluded == 3);  // -1, 0, 1 mrad on this grid
}

TEST_CASE("fit command") {
    const std::string fixture = std::string(ETALON_FIXTURES_DIR) + "/synthetic_tuning.csv";
    SUBCASE("recovers the embedded ground truth") {
        const RunResult r = run(
            "fit --data " + fixture +
            " --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 --psat-W 44 --g0 0.11 --tout 0.035 "
            "--format json");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.output);
        CHECK(std::abs(j["L0"].get<double>() - 0.0213) <= 1e-6);
        CHECK(j["converged"].get<bool>());
        CHECK(j["points"].get<int>() == 21);
    }
    SUBCASE("missing data file fails validation") {
        CHECK(run("fit --data /nonexistent.csv --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 "
                  "--psat-W 44 --g0 0.11 --tout 0.035").exit_code == 2);
    }
}

TEST_CASE("config file supplies defaults, flags win") {
    const std::string config = temp_path("config.ini");
    {
        std::ofstream out(config);
        out << "[loss]\nR=0.2\nn=1.447\nd-mm=4\nw0-um=370\ntheta-mrad=2\nmodel=simple\n"
               "format=json\n";
    }
    const auto defaults =
        nlohmann::json::parse(run("loss --config " + config).output);
    const auto direct = nlohmann::json::parse(
        run("loss --R 0.2 --n 1.447 --d-mm 4 --w0-um 370 --theta-mrad 2 --model simple "
            "--format json").output);
    CHECK(defaults["loss"] == direct["loss"]);

    const auto overridden =
        nlohmann::json::parse(run("loss --config " + config + " --R 0.27").output);
    const auto direct27 = nlohmann::json::parse(
        run("loss --R 0.27 --n 1.447 --d-mm 4 --w0-um 370 --theta-mrad 2 --model simple "
            "--format json").output);
    CHECK(overridden["loss"] == direct27["loss"]);
    CHECK(overridden["loss"] != defaults["loss"]);
}

TEST_CASE("version flag") {
    const RunResult r = run("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.1.0") != std::string::npos);
}
