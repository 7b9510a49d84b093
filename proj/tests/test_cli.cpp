#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "kgsym/cli.hpp"

using namespace kgsym;

namespace {

#ifndef KGSYM_CLI_PATH
#define KGSYM_CLI_PATH "kgsym"
#endif

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_binary(const std::string& args) {
    std::string tmp = "cli_out.tmp";
    std::string cmd = std::string(KGSYM_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(tmp.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

}  // namespace

TEST_CASE("collineations command") {
    auto r = run_binary("collineations --family conformally-flat-trig");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("C2-y") != std::string::npos);
    CHECK(r.output.find("pass=15") != std::string::npos);
    CHECK(r.output.find("fail=0") != std::string::npos);

    auto general = run_binary("collineations --family general --A t --B t^2 --C t^3");
    CHECK(general.exit_code == 0);
    CHECK(general.output.find("pass=3") != std::string::npos);

    auto hv = run_binary(
        "collineations --family proper-ckv --alpha 1 --beta 1 --gamma 1 --U 1/t "
        "--intU \"ln(t)\"");
    CHECK(hv.exit_code == 0);
    CHECK(hv.output.find("classified HV") != std::string::npos);
}

TEST_CASE("verify-tables command") {
    auto r = run_binary("verify-tables --tables 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("fail=0") != std::string::npos);

    // Table 6 flags both the argument typos and the determining-equation sign.
    auto r6 = run_binary("verify-tables --tables 6");
    CHECK(r6.exit_code == 0);
    CHECK(r6.output.find("not wave-admissible") != std::string::npos);
    CHECK(r6.output.find("constraint-delta-psi-sign") != std::string::npos);

    auto r3 = run_binary("verify-tables --tables 3 --row 3");
    CHECK(r3.exit_code == 0);
    CHECK(r3.output.find("flagged-typo") != std::string::npos);
    CHECK(r3.output.find("printed reading residual") != std::string::npos);
}

TEST_CASE("commutators command") {
    auto r = run_binary("commutators --family proper-ckv --alpha 1 --beta 2 --gamma 2");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("fail=0") != std::string::npos);
    auto rt = run_binary("commutators --family conformally-flat-trig");
    CHECK(rt.exit_code == 0);
    CHECK(rt.output.find("[Ybar4,Ybar7]") != std::string::npos);
}

TEST_CASE("reduce command") {
    auto r = run_binary("reduce --case b-plus-x --mu3 0.5 --mu4 1 --mu5 1 --closed-form");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("closed-form") != std::string::npos);

    auto a1 = run_binary("reduce --case a1 --A t --B t --C t --V 0 --mu 1,0,0");
    CHECK(a1.exit_code == 0);
    CHECK(a1.output.find("fail=0") != std::string::npos);

    // The inheritance gate rejects the forbidden branch with a usage error.
    auto gate = run_binary("reduce --case a2 --mu1 0.5 --alpha 1/2");
    CHECK(gate.exit_code == 2);
    CHECK(gate.output.find("rejected") != std::string::npos);
}

TEST_CASE("residual command") {
    auto r = run_binary(
        "residual --family conformally-flat-trig --u \"sin(z)\" --V 1");
    CHECK(r.exit_code == 0);
}

TEST_CASE("json reports are deterministic and schema-complete") {
    auto a = run_binary("verify-tables --tables 5 --json");
    auto b = run_binary("verify-tables --tables 5 --json");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    for (const char* key :
         {"\"meta\"", "\"seed\"", "\"tol\"", "\"version\"", "\"checks\"", "\"id\"",
          "\"anchor\"", "\"status\"", "\"residual\"", "\"summary\"", "\"pass\"",
          "\"fail\"", "\"flagged\""}) {
        CHECK_MESSAGE(a.output.find(key) != std::string::npos, key);
    }
    // A different seed still succeeds (deterministically different samples).
    auto c = run_binary("verify-tables --tables 5 --json --seed 7");
    CHECK(c.exit_code == 0);
    CHECK(c.output.find("\"seed\":7") != std::string::npos);
}

TEST_CASE("in-process reports match the subprocess output") {
    RunOptions run;
    FamilyOptions fam;
    fam.family = "conformally-flat-trig";
    Report rep = cmd_collineations(fam, run);
    CHECK(rep.ok());
    CHECK(rep.checks.size() == 15);
    auto sub = run_binary("collineations --family conformally-flat-trig --json");
    CHECK(sub.output.find(rep.to_json()) == 0);
}

TEST_CASE("bad inputs produce usage errors") {
    CHECK(run_binary("verify-tables --tables 4").exit_code == 2);
    CHECK(run_binary("collineations --family nowhere").exit_code == 2);
    CHECK(run_binary("residual --u \"frob(x)\"").exit_code == 2);
    CHECK(run_binary("collineations --family proper-ckv --U 1/t").exit_code == 2);
}

TEST_CASE("catalog export") {
    auto r = run_binary("verify-tables --tables 1,5 --export");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("table=1 row=1") != std::string::npos);
    CHECK(r.output.find("noether=no") != std::string::npos);   // the trivial row
    CHECK(r.output.find("table=5 row=4") != std::string::npos);
    auto j = run_binary("verify-tables --tables 2 --export --json");
    CHECK(j.exit_code == 0);
    CHECK(j.output.find("\"template\"") != std::string::npos);
    CHECK(j.output.find("\"coefficients\"") != std::string::npos);
    CHECK(j.output.find("\"noether\":true") != std::string::npos);
}
