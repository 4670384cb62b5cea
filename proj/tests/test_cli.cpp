#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

int run_cli(const std::string& args, const std::string& log = "cli_test_log.txt") {
    const std::string cmd = std::string(CRF_BIN) + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("usage and config errors exit with code 2") {
    CHECK(run_cli("") == 2);
    CHECK(read_file("cli_test_log.txt").find("usage") != std::string::npos);
    CHECK(run_cli("no-such-experiment --config missing.json") == 2);
    CHECK(run_cli("elliptic --config does_not_exist.json") == 2);
    write_file("cli_bad.json", "{ not json");
    CHECK(run_cli("elliptic --config cli_bad.json") == 2);
    write_file("cli_bad_model.json", "{\"model\": {\"family\": \"torus\"}}");
    CHECK(run_cli("elliptic --config cli_bad_model.json") == 2);
}

TEST_CASE("validate-ricci passes and writes its artifacts") {
    write_file("cli_ok.json", "{}");
    CHECK(run_cli("validate-ricci --config cli_ok.json --out cli_out_v --workers 4") == 0);
    const std::string report = read_file("cli_out_v/report.json");
    REQUIRE(!report.empty());
    const nlohmann::json j = nlohmann::json::parse(report);
    CHECK(j["experiment"] == "validate-ricci");
    CHECK(j["pass"] == true);
    CHECK(j["failures"].empty());
    CHECK(!read_file("cli_out_v/validate.csv").empty());
}

TEST_CASE("failed checks exit with code 1 and are listed in report.json") {
    // At t ~ 1 the elliptic metric is far from its normalized limit, so the
    // local isometry check cannot hold.
    write_file("cli_fail.json", "{\"t_values\": [1.0, 2.0]}");
    CHECK(run_cli("elliptic --config cli_fail.json --out cli_out_f --workers 4") == 1);
    const nlohmann::json j = nlohmann::json::parse(read_file("cli_out_f/report.json"));
    CHECK(j["pass"] == false);
    CHECK(!j["failures"].empty());
}

TEST_CASE("fixed seed reruns are byte identical") {
    write_file("cli_ok.json", "{}");
    REQUIRE(run_cli("elliptic --config cli_ok.json --out cli_out_a --workers 4") == 0);
    REQUIRE(run_cli("elliptic --config cli_ok.json --out cli_out_b --workers 2") == 0);
    for (const std::string f : {"elliptic.csv", "trajectory.csv"}) {
        const std::string a = read_file("cli_out_a/" + f);
        REQUIRE(!a.empty());
        CHECK(a == read_file("cli_out_b/" + f));
    }
    // A different seed changes the sample set and so the artifacts.
    REQUIRE(run_cli("elliptic --config cli_ok.json --out cli_out_c --seed 99") == 0);
    CHECK(read_file("cli_out_a/elliptic.csv") != read_file("cli_out_c/elliptic.csv"));
}

TEST_CASE("output directory precedence") {
    write_file("cli_cfg.json", "{\"out_dir\": \"cli_out_cfg\"}");
    const std::string tail = " validate-ricci --config cli_cfg.json > cli_test_log.txt 2>&1";

    // The config's out_dir applies when neither --out nor CRF_OUT is given.
    CHECK(std::system((std::string(CRF_BIN) + tail).c_str()) == 0);
    CHECK(!read_file("cli_out_cfg/report.json").empty());

    // CRF_OUT overrides the config ...
    CHECK(std::system(("CRF_OUT=cli_out_env " + std::string(CRF_BIN) + tail).c_str()) == 0);
    CHECK(!read_file("cli_out_env/report.json").empty());

    // ... and --out overrides CRF_OUT.
    CHECK(std::system(("CRF_OUT=cli_out_env2 " + std::string(CRF_BIN) +
                       " validate-ricci --config cli_cfg.json --out cli_out_flag"
                       " > cli_test_log.txt 2>&1")
                          .c_str()) == 0);
    CHECK(!read_file("cli_out_flag/report.json").empty());
    CHECK(read_file("cli_out_env2/report.json").empty());
}
