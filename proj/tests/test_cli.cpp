#include "support.hpp"

#include <abnet/cli/commands.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace abnet;
using namespace abnet::cli;
using abnet::testing::spec_path;
using nlohmann::json;

namespace {

json params_for(const std::string& file, json extra = json::object()) {
    extra["spec"] = spec_path(file);
    return extra;
}

std::vector<std::string> csv_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::stringstream ss(csv);
    for (std::string line; std::getline(ss, line);) lines.push_back(line);
    return lines;
}

int shell(const std::string& args) {
    const std::string cmd = std::string(ABNET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Digest, Fnv1a64KnownVectors) {
    EXPECT_EQ(digest(""), "cbf29ce484222325");
    EXPECT_EQ(digest("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(digest("foobar"), "85944171f73967e8");
}

TEST(ValidateCommand, ExamplesPass) {
    for (const char* f : {"ex1_critical_walk.json", "ex2_transfer.json", "ex3_two_state.json", "ex4_doubling.json"}) {
        const auto res = run_command("validate", params_for(f));
        EXPECT_EQ(res.exit_code, kSuccess) << f;
        EXPECT_TRUE(json::parse(res.output)["ok"].get<bool>());
    }
}

TEST(ValidateCommand, BfbFailureIsADomainFailure) {
    auto doc = json::parse(std::ifstream(spec_path("ex2_transfer.json")));
    doc["rules"]["u/s"][0]["delta"]["u"] = -3;
    const std::string path = ::testing::TempDir() + "bfb_violation.json";
    std::ofstream(path) << doc.dump();
    const auto res = run_command("validate", json{{"spec", path}});
    EXPECT_EQ(res.exit_code, kDomainFailure);
    const auto out = json::parse(res.output);
    ASSERT_EQ(out["bfb"]["violations"].size(), 1u);
    EXPECT_EQ(out["bfb"]["violations"][0]["value"], -3);
    EXPECT_EQ(out["bfb"]["violations"][0]["coordinate"], "u");
}

TEST(ValidateCommand, MalformedJsonIsAnInputError) {
    const std::string path = ::testing::TempDir() + "malformed.json";
    std::ofstream(path) << "{\"vertices\": [";
    EXPECT_EQ(run_command("validate", json{{"spec", path}}).exit_code, kInputError);
    EXPECT_EQ(run_command("validate", json{{"spec", "/does/not/exist.json"}}).exit_code, kInputError);
    EXPECT_EQ(run_command("nonsense", json::object()).exit_code, kInputError);
}

TEST(ClassifyCommand, ExampleRegimes) {
    const auto r3 = json::parse(run_command("classify", params_for("ex3_two_state.json")).output);
    EXPECT_EQ(r3["regime"], "subcritical");
    EXPECT_NEAR(r3["rho"].get<double>(), std::sqrt(0.5) - 1, 1e-9);
    const auto r2 = json::parse(run_command("classify", params_for("ex2_transfer.json")).output);
    EXPECT_EQ(r2["regime"], "critical_conserved");
    EXPECT_NEAR(r2["a"][0].get<double>(), 1.0, 1e-12);
    const auto r4 = json::parse(run_command("classify", params_for("ex4_doubling.json")).output);
    EXPECT_EQ(r4["regime"], "supercritical");
    EXPECT_NEAR(r4["rho"].get<double>(), 1.0, 1e-10);
    const auto r1 = json::parse(run_command("classify", params_for("ex1_critical_walk.json")).output);
    EXPECT_EQ(r1["regime"], "critical_stabilizing");
}

TEST(Seeds, RandomizedCommandsRequireSeed) {
    for (const char* cmd : {"simulate", "walk", "survive", "conserved"}) {
        const auto res = run_command(cmd, params_for("ex3_two_state.json", {{"eta", {3, 3}}}));
        EXPECT_EQ(res.exit_code, kInputError) << cmd;
    }
    EXPECT_EQ(run_command("sweep", json{{"template", spec_path("symmetric_transfer.template.json")},
                                        {"param", "m"},
                                        {"grid", "1"}})
                  .exit_code,
              kInputError);
}

TEST(Simulate, JsonLinesPerRunIndependentOfJobs) {
    auto p = params_for("ex3_two_state.json", {{"eta", {6, 6}}, {"runs", 20}, {"seed", 3}});
    const auto one = run_command("simulate", p);
    p["jobs"] = 4;
    const auto four = run_command("simulate", p);
    ASSERT_EQ(one.exit_code, kSuccess);
    EXPECT_EQ(one.output, four.output);
    const auto lines = csv_lines(one.output);
    ASSERT_EQ(lines.size(), 20u);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto j = json::parse(lines[i]);
        EXPECT_EQ(j["run"], i);
        EXPECT_EQ(j["tag"], "stabilized");
    }
}

TEST(Survive, ViableSearchOnlyForSupercritical) {
    const auto ok = run_command("survive", params_for("ex4_doubling.json", {{"eta", "viable"},
                                                                             {"seed", 1},
                                                                             {"runs", 50},
                                                                             {"horizon", 2000}}));
    ASSERT_EQ(ok.exit_code, kSuccess) << ok.message;
    EXPECT_GT(json::parse(ok.output)["survival"]["fraction"].get<double>(), 0.0);
    const auto bad = run_command("survive", params_for("ex3_two_state.json", {{"eta", "viable"}, {"seed", 1}}));
    EXPECT_EQ(bad.exit_code, kDomainFailure);
}

TEST(Conserved, ReportsVerification) {
    const auto res = run_command("conserved", params_for("ex2_transfer.json", {{"seed", 2}, {"steps", 2000}}));
    ASSERT_EQ(res.exit_code, kSuccess);
    const auto out = json::parse(res.output);
    EXPECT_TRUE(out["detection"]["found"].get<bool>());
    EXPECT_EQ(out["unstable_initial_state"]["eta"], json({{"u", 3}, {"v", 3}}));
    EXPECT_EQ(out["verification"]["max_deviation"], 0.0);
    EXPECT_FALSE(out["verification"]["stabilized"].get<bool>());
}

TEST(Sweep, SymmetricFamilyCoversAllRegimes) {
    const json p{{"template", spec_path("symmetric_transfer.template.json")},
                 {"param", "m"},
                 {"grid", "0.5,1,2"},
                 {"seed", 11},
                 {"runs", 20},
                 {"horizon", 500}};
    const auto res = run_command("sweep", p);
    ASSERT_EQ(res.exit_code, kSuccess) << res.message;
    const auto lines = csv_lines(res.output);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "value,rho,regime,survival_fraction");
    const std::vector<std::pair<double, std::string>> expected{
        {-0.5, "subcritical"}, {0.0, "critical_conserved"}, {1.0, "supercritical"}};
    double last_rho = -1e9;
    for (std::size_t i = 0; i < 3; ++i) {
        std::stringstream ss(lines[i + 1]);
        std::string value, rho, regime;
        std::getline(ss, value, ',');
        std::getline(ss, rho, ',');
        std::getline(ss, regime, ',');
        EXPECT_NEAR(std::stod(rho), expected[i].first, 1e-9);
        EXPECT_EQ(regime, expected[i].second);
        EXPECT_GT(std::stod(rho), last_rho);
        last_rho = std::stod(rho);
    }
}

TEST(Sweep, EmptyGridGivesHeaderOnly) {
    const json p{{"template", spec_path("symmetric_transfer.template.json")}, {"param", "m"}, {"grid", ""}, {"seed", 1}};
    const auto res = run_command("sweep", p);
    EXPECT_EQ(res.exit_code, kSuccess);
    EXPECT_EQ(res.output, "value,rho,regime,survival_fraction\n");
}

TEST(Sweep, GridParsing) {
    EXPECT_EQ(parse_grid("0.5,1,2"), (std::vector<double>{0.5, 1, 2}));
    EXPECT_EQ(parse_grid("0:1:0.5"), (std::vector<double>{0, 0.5, 1}));
    EXPECT_EQ(parse_grid(json::array({1, 2})), (std::vector<double>{1, 2}));
    EXPECT_THROW(parse_grid("1,x"), SchemaError);
    EXPECT_THROW(parse_grid("0:1"), SchemaError);
}

TEST(Template, FractionalKnobSplitsAtoms) {
    const auto tmpl = json::parse(std::ifstream(spec_path("symmetric_transfer.template.json")));
    const auto spec = parse_spec(instantiate_template(tmpl, "m", 1.25));
    const auto& atoms = spec.rules[0][0].atoms;
    ASSERT_EQ(atoms.size(), 2u);
    EXPECT_EQ(atoms[0].delta, (IntVector{-1, 1}));
    EXPECT_DOUBLE_EQ(atoms[0].prob, 0.75);
    EXPECT_EQ(atoms[1].delta, (IntVector{-1, 2}));
    EXPECT_DOUBLE_EQ(atoms[1].prob, 0.25);
    EXPECT_NEAR(criticality(spec).rho, 0.25, 1e-10);
    EXPECT_THROW(instantiate_template(tmpl, "k", 1.0), SchemaError);
}

TEST(Manifest, ReplayReproducesDigest) {
    const auto p = params_for("ex3_two_state.json", {{"seed", 5}, {"excursions", 3000}, {"jobs", 2}});
    const auto res = run_command("walk", p);
    ASSERT_EQ(res.exit_code, kSuccess);
    const auto manifest = make_manifest("walk", p, res);
    EXPECT_EQ(manifest["output_digest"], digest(res.output));
    const auto replay = replay_manifest(manifest);
    EXPECT_EQ(replay.exit_code, kSuccess);
    EXPECT_TRUE(json::parse(replay.output)["identical"].get<bool>());

    auto tampered = manifest;
    tampered["params"]["seed"] = 6;
    EXPECT_EQ(replay_manifest(tampered).exit_code, kDomainFailure);
}

TEST(Pretty, AlignedKeyValueLines) {
    const auto text = run_command("classify", params_for("ex4_doubling.json", {{"pretty", true}})).output;
    EXPECT_NE(text.find("regime                supercritical"), std::string::npos) << text;
    EXPECT_EQ(text.find('{'), std::string::npos);
}

TEST(Binary, ExitCodeContract) {
    EXPECT_EQ(shell("validate --spec " + spec_path("ex3_two_state.json")), 0);
    EXPECT_EQ(shell("classify --spec /does/not/exist.json"), 2);
    EXPECT_EQ(shell("simulate --spec " + spec_path("ex3_two_state.json") + " --eta '[3,3]'"), 2);
    EXPECT_EQ(shell("survive --spec " + spec_path("ex3_two_state.json") + " --eta viable --seed 1"), 1);
    EXPECT_EQ(shell("walk --spec " + spec_path("ex3_two_state.json") + " --seed -4"), 2);
    EXPECT_EQ(shell("no-such-command"), 2);
}

TEST(Binary, ManifestRoundTrip) {
    const std::string dir = ::testing::TempDir();
    const std::string manifest = dir + "abnet_manifest.json";
    const std::string out = dir + "abnet_out.txt";
    ASSERT_EQ(shell("survive --spec " + spec_path("ex4_doubling.json") +
                    " --eta '[2,2]' --seed 8 --runs 30 --horizon 500 --jobs 3 --manifest " + manifest + " --out " + out),
              0);
    EXPECT_EQ(shell("replay " + manifest), 0);
    std::ifstream in(out);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto m = json::parse(std::ifstream(manifest));
    EXPECT_EQ(m["output_digest"], digest(buf.str()));
}
