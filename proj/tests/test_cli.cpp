#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(FADEKIT_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::pair<double, double> parse_csv_row(const std::string& line) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    return {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))};
}

}  // namespace

TEST_CASE("cli eval emits the declared CSV") {
    const RunResult r = run_cli("eval --what cdf --gbar 1 --kappa 3 --mu 2 --m 2 --grid 0:5:6");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 7);  // header + 6 rows
    CHECK(lines[0] == "x,value");
    const auto [x0, v0] = parse_csv_row(lines[1]);
    CHECK(x0 == 0.0);
    CHECK(v0 == 0.0);
    double prev = -1.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [x, v] = parse_csv_row(lines[i]);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("cli eval output is byte-identical across runs") {
    const std::string args = "eval --what pdf --gbar 1 --kappa 5 --mu 3 --m 2 --grid 0.001:40:64 --log";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(lines_of(a.out).size() == 65);
}

TEST_CASE("cli mixture reports components and checks as JSON") {
    const RunResult r = run_cli("mixture --gbar 1 --kappa 1 --mu 1 --m 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("regime") == "proper");
    REQUIRE(j.at("components").size() == 2);
    CHECK(j["components"][0]["weight"].get<double>() == Catch::Approx(1.0 / 3.0));
    CHECK(j["components"][1]["weight"].get<double>() == Catch::Approx(2.0 / 3.0));
    CHECK(j["checks"]["weight_sum"].get<double>() == Catch::Approx(1.0).margin(1e-12));
    CHECK(j["checks"]["mean"].get<double>() == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("cli capacity rows are monotone and AWGN-bounded") {
    const RunResult r = run_cli("capacity --kappa 10 --mu 3 --m 3 --gbar-db-grid 0:40:41");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 42);
    CHECK(lines[0] == "snr_db,capacity_bpshz");
    double prev = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [db, cap] = parse_csv_row(lines[i]);
        CHECK(cap > prev);
        CHECK(cap <= std::log2(1.0 + std::pow(10.0, db / 10.0)));
        prev = cap;
    }
}

TEST_CASE("cli sample writes a parseable deterministic stream") {
    const RunResult a = run_cli("sample --gbar 1 --kappa 1 --mu 1 --m 2 --n 200 --seed 7");
    const RunResult b = run_cli("sample --gbar 1 --kappa 1 --mu 1 --m 2 --n 200 --seed 7");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    const auto lines = lines_of(a.out);
    REQUIRE(lines.size() == 200);
    for (const auto& line : lines) CHECK(std::stod(line) >= 0.0);
}

TEST_CASE("cli fit round-trips sample files into a fit report") {
    const std::string sample_path = "cli_fit_sample.tmp";
    {
        const RunResult gen = run_cli(
            "sample --gbar 2 --kappa 4 --mu 2 --m 3 --n 5000 --seed 11 --out " + sample_path);
        REQUIRE(gen.exit_code == 0);
    }
    const RunResult r =
        run_cli("fit --in " + sample_path + " --mu-max 3 --m-max 4 --models shadowed_int,nakagami");
    std::remove(sample_path.c_str());
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"model", "gamma_bar", "kappa", "mu", "m", "epsilon",
                            "candidates", "grid"})
        CHECK(j.contains(key));
    CHECK(j["candidates"].size() == 3 * 4 + 4);
    CHECK(j["grid"]["n_points"].get<int>() == 2000);
}

TEST_CASE("cli converge and approx-rician emit their CSV") {
    {
        const RunResult r = run_cli("converge --kappa 5 --mu 3 --gbar 1 --m-list 2,5");
        REQUIRE(r.exit_code == 0);
        const auto lines = lines_of(r.out);
        REQUIRE(lines.size() == 3);
        CHECK(lines[0] == "m,sup_gap");
        const auto [m0, g0] = parse_csv_row(lines[1]);
        const auto [m1, g1] = parse_csv_row(lines[2]);
        CHECK(m0 == 2.0);
        CHECK(m1 == 5.0);
        CHECK(g1 < g0);
    }
    {
        const RunResult r = run_cli("approx-rician --K 3 --m-list 5,20");
        REQUIRE(r.exit_code == 0);
        const auto lines = lines_of(r.out);
        REQUIRE(lines.size() == 3);
        CHECK(lines[0] == "m,sup_pdf_gap");
        const auto [m0, g0] = parse_csv_row(lines[1]);
        const auto [m1, g1] = parse_csv_row(lines[2]);
        CHECK(g1 < g0);
    }
}

TEST_CASE("cli exit codes separate flag errors from computation errors") {
    CHECK(run_cli("eval --what pdf").exit_code == 2);          // missing flags
    CHECK(run_cli("nonsense").exit_code == 2);                 // unknown subcommand
    CHECK(run_cli("eval --what mgf --gbar 1 --kappa 3 --mu 2 --m 2 --grid 0:5:3").exit_code ==
          1);                                                  // mgf out of region
    CHECK(run_cli("sample --gbar 1 --kappa -1 --mu 1 --m 1 --n 5 --seed 1").exit_code == 1);
    CHECK(run_cli("fit --in does_not_exist.dat").exit_code == 1);
}

TEST_CASE("cli help exits zero for every subcommand") {
    CHECK(run_cli("--help").exit_code == 0);
    for (const char* sub :
         {"mixture", "eval", "capacity", "sample", "fit", "converge", "approx-rician"}) {
        const RunResult r = run_cli(std::string(sub) + " --help");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("--") != std::string::npos);
    }
}
