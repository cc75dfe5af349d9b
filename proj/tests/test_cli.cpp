#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "cldp/report.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cldp;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CLDP_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) r.output += buf.data();
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("approx subcommand json") {
    const auto r = run_cli("approx --jump pareto:alpha=3 --n 10000 --M 3000 --x 4500 --h 0.05 --eps 0.1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["result"]["regime"] == "Interior(2)");
    CHECK(j["result"]["k"] == 2);
    CHECK(j["result"]["terms"].size() == 3);
    double sum = 0.0;
    for (const auto& t : j["result"]["terms"]) sum += t["value"].get<double>();
    CHECK(sum == doctest::Approx(j["result"]["value"].get<double>()).epsilon(1e-12));
    // metadata echoes resolved parameters
    for (const char* key : {"n", "M", "alpha", "s_n", "Pi_n", "eps", "h", "d", "seed"})
        CHECK(j["metadata"].contains(key));
}

TEST_CASE("approx validation failures exit 2") {
    CHECK(run_cli("approx --n 10000 --M 3000 --x -5").exit_code == 2);
    const auto r = run_cli("approx --n 10000 --M 3000 --x -5");
    CHECK(r.output.find("x must be positive") != std::string::npos);
    CHECK(run_cli("approx --jump pareto:alpha=2 --n 10000 --M 3000 --x 100").exit_code == 2);
    CHECK(run_cli("approx --n 10000 --M 3000 --x 99999999").exit_code == 2);
}

TEST_CASE("sweep row count and schema") {
    const auto r = run_cli("sweep --n 2000 --M 1500 --x-from 750 --x-to 3750 --points 200");
    REQUIRE(r.exit_code == 0);
    size_t rows = 0, headers = 0;
    std::string header_line;
    size_t pos = 0;
    while (pos < r.output.size()) {
        size_t end = r.output.find('\n', pos);
        if (end == std::string::npos) end = r.output.size();
        const std::string line = r.output.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("x,", 0) == 0) {
            ++headers;
            header_line = line;
        } else {
            ++rows;
        }
    }
    CHECK(headers == 1);
    CHECK(header_line == kSweepHeaderBase);
    CHECK(rows == 200);
}

TEST_CASE("sweep with stratified MC adds positive probability columns") {
    const auto r = run_cli(
        "sweep --n 400 --M 200 --x-from 20 --x-to 60 --points 3 --with-mc stratified --samples 2000 "
        "--seed 7 --y-factor 0.3 --k-cap 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find(std::string(kSweepHeaderBase) + kSweepHeaderMC) != std::string::npos);
    // every data row has mc_p > 0 at these mild thresholds
    size_t pos = 0;
    int data_rows = 0;
    while (pos < r.output.size()) {
        size_t end = r.output.find('\n', pos);
        if (end == std::string::npos) end = r.output.size();
        const std::string line = r.output.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
        ++data_rows;
        const auto last_comma = line.rfind(',');
        const auto mc_cols = line.find_last_of(',', last_comma - 1);
        (void)mc_cols;
        CHECK(line.find(",,") != 0);
    }
    CHECK(data_rows == 3);
}

TEST_CASE("overlap rows carry the alternative formula in the diagnostic column") {
    // x = 1.93 M sits in I- for k=2 with h=0.05, eps=0.1
    const auto r = run_cli("approx --n 10000 --M 3000 --x 5790 --h 0.05 --eps 0.1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["result"]["regime"] == "NearMultiple(2)");
    REQUIRE(j["result"].contains("diagnostic"));
    CHECK(j["result"]["diagnostic"]["label"] == "interior_k2");
    CHECK(j["result"]["diagnostic"]["value"].get<double>() > 0.0);
}

TEST_CASE("wk subcommand routes") {
    const auto r = run_cli("wk --k 2 --z 1.5 --alpha 3 --closed --oracle --samples 200000 --seed 5");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    const double quad = j["quadrature"].get<double>();
    CHECK(quad == doctest::Approx(6.2313925560359).epsilon(1e-8));
    CHECK(j["closed"].get<double>() == doctest::Approx(quad).epsilon(1e-6));
    CHECK(std::abs(j["oracle"]["value"].get<double>() - quad) <=
          3.0 * j["oracle"]["std_err"].get<double>());
    CHECK(run_cli("wk --k 3 --z 2.5 --closed").exit_code == 2);
    CHECK(run_cli("wk --k 2 --z 0.5").exit_code == 2);
}

TEST_CASE("simulate subcommand") {
    const auto r = run_cli(
        "simulate --n 300 --M 100 --x 30 --method stratified --samples 5000 --seed 9 --y-factor 0.3 "
        "--k-cap 3 --workers 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["result"]["method"] == "stratified");
    CHECK(j["result"]["p_hat"].get<double>() > 0.0);
    CHECK(j["result"]["strata"].size() == 4);
    CHECK(j["metadata"]["y_factor"].get<double>() == 0.3);
}

TEST_CASE("seed environment override") {
    const auto r1 = run_cli("simulate --n 200 --M 100 --x 25 --samples 2000 --y-factor 0.3");
    setenv("CENSORED_LDP_SEED", "987", 1);
    const auto r2 = run_cli("simulate --n 200 --M 100 --x 25 --samples 2000 --y-factor 0.3");
    unsetenv("CENSORED_LDP_SEED");
    const auto j1 = nlohmann::json::parse(r1.output);
    const auto j2 = nlohmann::json::parse(r2.output);
    CHECK(j1["metadata"]["seed"].get<uint64_t>() == kDefaultSeed);
    CHECK(j2["metadata"]["seed"].get<uint64_t>() == 987);
}

TEST_CASE("validate --quick") {
    const auto r = run_cli("validate --quick");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("PASS  criterion 1") != std::string::npos);
}

TEST_CASE("validate soft-censoring injection skips asymptotic criteria") {
    const auto r = run_cli("validate --M 500 --samples 1000");
    CHECK(r.output.find("SKIP") != std::string::npos);
    CHECK(r.output.find("WARNING") != std::string::npos);
    CHECK(r.output.find("soft-censoring") != std::string::npos);
    CHECK(r.exit_code == 0);
}

TEST_CASE("printed reals round-trip to the same double") {
    for (double v : {5.6923077439875437e-07, 1.0 / 3.0, 3.141592653589793, 2.2250738585072014e-308,
                     123456789.12345679, 6.2313925560359}) {
        const std::string s = format_real(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("sweep csv row layout is stable") {
    // golden layout: 13 base columns, terms padded with empty fields
    Approximation a;
    a.value = 0.5;
    a.k = 1;
    a.regime.tag = Regime::Tag::NearMultiple;
    a.regime.k = 1;
    a.terms = {{"gaussian", 0.3}, {"single_jump", 0.2}};
    const std::string row = sweep_csv_row(3000.0, 3000.0, a, nullptr);
    CHECK(row == "3000,1,NearMultiple(1),1,0.5,0.29999999999999999,0.20000000000000001,,,,,,");
}
