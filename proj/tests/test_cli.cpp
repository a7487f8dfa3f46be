#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef HAMREEB_CLI_PATH
#define HAMREEB_CLI_PATH "./hamreeb"
#endif

namespace {

struct CliRun {
    int exit_code = -1;
    std::string stdout_text;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

CliRun run_cli(const std::string& args, const std::string& outdir) {
    const std::string stdout_file = outdir + "/stdout.txt";
    const std::string cmd = std::string(HAMREEB_CLI_PATH) + " " + args + " --out " + outdir +
                            " > " + stdout_file + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WEXITSTATUS(rc);
    r.stdout_text = slurp(stdout_file);
    return r;
}

std::string make_outdir(const char* tag) {
    std::string dir = std::string("cli_out_") + tag;
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    return dir;
}

}  // namespace

TEST_CASE("cli: analyze reports the Morse classification") {
    const auto dir = make_outdir("analyze");
    const auto r = run_cli("analyze --surface disk --field r2", dir);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir + "/analyze.json"));
    CHECK(j["axioms"]["in_class_Morse"] == true);
    CHECK(j["homotopy_case"] == "circle(B)");
    CHECK(j["passed"] == true);

    SECTION("r4 is reported outside class F, still exit 0") {
        const auto r4 = run_cli("analyze --surface disk --field r4", dir);
        CHECK(r4.exit_code == 0);
        const auto j4 = nlohmann::json::parse(slurp(dir + "/analyze.json"));
        CHECK(j4["axioms"]["in_class_F"] == false);
    }
}

TEST_CASE("cli: unknown names exit with code 2") {
    const auto dir = make_outdir("bad");
    CHECK(run_cli("analyze --surface klein --field r2", dir).exit_code == 2);
    CHECK(run_cli("analyze --surface disk --field nope", dir).exit_code == 2);
    CHECK(run_cli("theta --surface twowell --field twowell", dir).exit_code == 2);
}

TEST_CASE("cli: malformed graph function json exits with code 2") {
    const auto dir = make_outdir("badjson");
    {
        std::ofstream os(dir + "/gf.json");
        os << "{ not json";
    }
    const auto r = run_cli("shift --surface disk --field r2 --graph-function " + dir + "/gf.json",
                           dir);
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: reeb emits graph json and dot") {
    const auto dir = make_outdir("reeb");
    const auto r = run_cli("reeb --surface twowell --field twowell --resolution 0.05", dir);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir + "/reeb.json"));
    CHECK(j["graph"]["nodes"].size() == 4);
    CHECK(j["graph"]["edges"].size() == 3);
    CHECK(slurp(dir + "/reeb.dot").find("graph reeb") == 0);
}

TEST_CASE("cli: flow writes a trajectory csv with conserved f") {
    const auto dir = make_outdir("flow");
    const auto r = run_cli("flow --surface disk --field r2 --x 0.5 --y 0 --time 1.5", dir);
    REQUIRE(r.exit_code == 0);
    const auto csv = slurp(dir + "/flow.csv");
    CHECK(csv.rfind("t,chart,x,y,f", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), char(10)) == 1502);  // header + 1501 samples
}

TEST_CASE("cli: shift verifies a constant graph function") {
    const auto dir = make_outdir("shift");
    const auto r = run_cli("shift --surface disk --field r2 --alpha-const 0.8", dir);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir + "/shift.json"));
    CHECK(j["passed"] == true);
}

TEST_CASE("cli: volumes with the tilted form reports the obstruction, exit 0") {
    const auto dir = make_outdir("volumes");
    // the field defaults to the surface's model field
    const auto r = run_cli(
        "volumes --surface twowell --form tilted --level 0.5 --involution negate "
        "--resolution 0.02",
        dir);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir + "/volumes.json"));
    CHECK(j["obstruction"]["obstructed"] == true);
    CHECK(j["components"].size() == 2);
    CHECK(j["inputs"]["field"] == "twowell");
}

TEST_CASE("cli: polynomial field definitions from a json file") {
    const auto dir = make_outdir("fieldjson");
    {
        std::ofstream os(dir + "/field.json");
        os << R"({"poly": [[2,0,1.0],[0,2,1.0]], "codomain": "line"})";
    }
    const auto r = run_cli("analyze --surface disk --field-json " + dir + "/field.json", dir);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir + "/analyze.json"));
    CHECK(j["homotopy_case"] == "circle(B)");
}

TEST_CASE("cli: counterexample scenario passes") {
    const auto dir = make_outdir("counter");
    const auto r = run_cli("counterexample", dir);
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir + "/counterexample.json"));
    CHECK(j["scenario"]["passed"] == true);
}

TEST_CASE("cli: identical invocations produce byte-identical reports") {
    const auto dir1 = make_outdir("det1");
    const auto dir2 = make_outdir("det2");
    const std::string args = "reeb --surface twowell --field twowell --resolution 0.05 --seed 0";
    REQUIRE(run_cli(args, dir1).exit_code == 0);
    REQUIRE(run_cli(args, dir2).exit_code == 0);
    // reports name no paths except --out contents; compare payloads
    CHECK(slurp(dir1 + "/reeb.json") == slurp(dir2 + "/reeb.json"));
    CHECK(slurp(dir1 + "/reeb.dot") == slurp(dir2 + "/reeb.dot"));

    const std::string cargs = "counterexample --seed 0";
    REQUIRE(run_cli(cargs, dir1).exit_code == 0);
    REQUIRE(run_cli(cargs, dir2).exit_code == 0);
    CHECK(slurp(dir1 + "/counterexample.json") == slurp(dir2 + "/counterexample.json"));
}

TEST_CASE("cli: HAMREEB_OUT overrides the default output directory") {
    const auto dir = make_outdir("envout");
    const std::string cmd = std::string("HAMREEB_OUT=") + dir + " " + HAMREEB_CLI_PATH +
                            " analyze --surface disk --field r2 > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(!slurp(dir + "/analyze.json").empty());
}
