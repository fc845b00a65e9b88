#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "grnbounds/app/commands.hpp"
#include "grnbounds/app/config.hpp"

using namespace grnbounds::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = GRNBOUNDS_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("grnbounds_cli_" + name);
    fs::remove_all(p);
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json small_config() {
    return json::parse(R"({
      "schema": 1,
      "network": {"A": [[0.5, -1.0], [0.0, 0.2]], "nu": [2.0, 1.0], "rho": [0.5, 0.5]},
      "final_data": {"c": [1.0, 0.4], "b": [20.0, 6.0]},
      "window": {"T": 2.0, "t": 1.0},
      "pde": {"a": 5, "N": 6, "points_per_axis": 33},
      "ssa": {"ensemble": 500, "seed": 4, "sample_times": [0.5]}
    })");
}

int run(const std::string& command, const RunConfig& cfg, const fs::path& out, unsigned threads, std::ostream& log) {
    CommandOptions o;
    o.out = out;
    o.threads = threads;
    o.log = &log;
    return run_command(command, cfg, o);
}

}  // namespace

TEST(Config, MissingRhoNamesTheKey) {
    auto j = small_config();
    j["network"].erase("rho");
    try {
        parse_config(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("network.rho"), std::string::npos);
    }
}

TEST(Config, UnknownKeyIsAnError) {
    auto j = small_config();
    j["pde"]["spacing"] = 0.1;
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, SchemaMustBeOne) {
    auto j = small_config();
    j["schema"] = 2;
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, DimensionMismatch) {
    auto j = small_config();
    j["final_data"]["c"] = {1.0, 2.0, 3.0};
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, ExactlyOneFinalDataSource) {
    auto j = small_config();
    j["final_data"]["fit_from_ssa"] = true;
    EXPECT_THROW(parse_config(j), ConfigError);
    j["final_data"] = {{"fit_from_ssa", true}};
    EXPECT_THROW(parse_config(j), ConfigError);
    j["ssa"]["initial"] = {20, 6};
    EXPECT_NO_THROW(parse_config(j));
}

TEST(Config, RoundTripIsIdentity) {
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        const auto cfg = load_config(entry.path());
        EXPECT_EQ(parse_config(to_json(cfg)), cfg) << entry.path();
        EXPECT_EQ(to_json(parse_config(to_json(cfg))), to_json(cfg));
    }
    const auto cfg = parse_config(small_config());
    EXPECT_EQ(parse_config(to_json(cfg)), cfg);
}

TEST(Config, MissingFileIsIoError) { EXPECT_THROW(load_config("/nonexistent/grnbounds.json"), IoError); }

TEST(Cli, BoundsHalfWidthTable) {
    const auto out = scratch("bounds532");
    std::ostringstream log;
    ASSERT_EQ(run("bounds", load_config(kConfigs / "paper_5_3_3.json"), out, 1, log), kOk) << log.str();
    const auto cert = read_json(out / "certificates.json");
    for (const auto& gene : cert["genes"]) {
        EXPECT_NEAR(gene["x_alpha"][0]["x_alpha"].get<double>(), 139.85, 0.01);
        EXPECT_NEAR(gene["x_alpha"][1]["x_alpha"].get<double>(), 186.25, 0.05);
    }
    EXPECT_NEAR(cert["genes"][0]["positivity_bound"].get<double>(), 4.4e-4, 0.05e-4);
    EXPECT_NEAR(cert["genes"][1]["positivity_bound"].get<double>() / 8e-5, 1.0, 0.05);
    EXPECT_NEAR(cert["genes"][2]["positivity_bound"].get<double>() / 4e-10, 1.0, 0.05);
    EXPECT_TRUE(read_json(out / "manifest.json")["complete"].get<bool>());
    EXPECT_FALSE(fs::exists(out / ".grnbounds.lock"));
}

TEST(Cli, SuppressedCertificate) {
    auto j = to_json(load_config(kConfigs / "paper_5_3_4_sim1.json"));
    j["bounds"]["mean"] = {10.0, 0.2, 0.3};
    j["bounds"]["abs_dev"] = {2.4, 0.3, 0.4};
    const auto out = scratch("suppressed");
    std::ostringstream log;
    ASSERT_EQ(run("bounds", parse_config(j), out, 1, log), kOk) << log.str();
    const auto s = read_json(out / "certificates.json")["suppressed"];
    EXPECT_NEAR(s["m_t"].get<double>(), 35.42, 0.01);
    EXPECT_NEAR(s["M_t"].get<double>(), 39.18, 0.01);
    EXPECT_EQ(read_text(out / "envelope.csv").substr(0, 19), "gene,x,lower,upper\n");
}

TEST(Cli, NumericalFailureExitCode) {
    auto j = small_config();
    j["ssa"]["ensemble"] = 1;
    j["final_data"] = {{"fit_from_ssa", true}};
    j["ssa"]["initial"] = {0, 0};
    j["network"]["nu"] = {0.0, 0.0};
    const auto out = scratch("numerical");
    std::ostringstream log;
    EXPECT_EQ(run("bounds", parse_config(j), out, 1, log), kNumericalError);
    const auto text = log.str();
    const auto diag = json::parse(text.substr(text.rfind('\n', text.size() - 2) + 1));
    EXPECT_EQ(diag["error"]["kind"], "numerical");
    const auto manifest = read_json(out / "manifest.json");
    EXPECT_FALSE(manifest["complete"].get<bool>());
    EXPECT_EQ(manifest["failure"]["stage"], "fit");
}

TEST(Cli, LockedDirectoryIsIoError) {
    const auto out = scratch("locked");
    fs::create_directories(out);
    std::ofstream(out / ".grnbounds.lock").put('x');
    std::ostringstream log;
    EXPECT_EQ(run("bounds", parse_config(small_config()), out, 1, log), kIoError);
}

TEST(Cli, PipelineArtifacts) {
    const auto out = scratch("pipeline");
    std::ostringstream log;
    ASSERT_EQ(run("pipeline", parse_config(small_config()), out, 1, log), kOk) << log.str();
    for (const char* name : {"envelope.csv", "moments.json", "histogram.csv", "coverage.json", "certificates.json"})
        EXPECT_TRUE(fs::exists(out / name)) << name;
    for (const char* stage : {"pde", "expect", "bounds", "ssa", "compare"})
        EXPECT_NE(log.str().find(std::string("stage ") + stage), std::string::npos) << stage;
}

TEST(Cli, SolveWritesThetaWithSidecar) {
    const auto out = scratch("solve");
    std::ostringstream log;
    ASSERT_EQ(run("solve", parse_config(small_config()), out, 1, log), kOk) << log.str();
    const auto text = read_text(out / "theta.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "x1,x2,theta1,theta2");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 33 * 33 + 1);
    EXPECT_EQ(read_json(out / "theta.json")["points_per_axis"], 33);
}

TEST(Cli, ArtifactsIdenticalAcrossThreadCounts) {
    const auto cfg = parse_config(small_config());
    const auto a = scratch("threads1");
    const auto b = scratch("threads3");
    std::ostringstream log;
    ASSERT_EQ(run("pipeline", cfg, a, 1, log), kOk);
    ASSERT_EQ(run("pipeline", cfg, b, 3, log), kOk);
    ASSERT_EQ(run("ssa", cfg, a / "ssa", 1, log), kOk);
    ASSERT_EQ(run("ssa", cfg, b / "ssa", 3, log), kOk);
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), a);
        EXPECT_EQ(read_text(entry.path()), read_text(b / rel)) << rel;
    }
}
