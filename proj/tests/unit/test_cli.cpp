#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hellbayes/error.hpp"
#include "hellbayes/io.hpp"
#include "hellbayes_cli/cli.hpp"
#include "oracles.hpp"

using namespace hellbayes;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hellbayes_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, HellingerClosedForm) {
    const auto r = run({"hellinger", "--g", "normal:0,1", "--f", "normal-loc:1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("d_h_sq").get<double>(), oracle::hellinger_normals(0, 1, 1, 1), 1e-6);
    EXPECT_NEAR(j.at("d_h_sq").get<double>(), 0.235, 1e-3);

    const auto s = run({"hellinger", "--g", "normal:0,1", "--f", "normal-loc-scale:0.5,2"});
    ASSERT_EQ(s.code, 0);
    EXPECT_NEAR(nlohmann::json::parse(s.out).at("d_h_sq").get<double>(), oracle::hellinger_normals(0, 1, 0.5, 2), 1e-6);

    const auto u = run({"hellinger", "--g", "uniform:0,1", "--f", "normal-loc:20"});
    ASSERT_EQ(u.code, 0);
    EXPECT_NEAR(nlohmann::json::parse(u.out).at("d_h_sq").get<double>(), 2.0, 5e-3);
}

TEST(Cli, UsageErrors) {
    const auto r = run({"dpmix"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--data"), std::string::npos);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"hellinger", "--g", "normal:0", "--f", "normal-loc:1"}).code, 1);
    EXPECT_EQ(run({"hellinger", "--g", "normal:0,1", "--f", "normal-loc-scale:0,-1"}).code, 1);
    EXPECT_EQ(run({"estimate", "--data", "/nonexistent/file.csv"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SimulateRejectsUnknownKeys) {
    const auto cfg = scratch("bad.json");
    write_file_atomic(cfg, R"({"replications": 2, "replicatoins": 3})");
    const auto r = run({"simulate", "--config", cfg.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("replicatoins"), std::string::npos);
    write_file_atomic(cfg, R"({"chain": {"stepz": 3}})");
    EXPECT_EQ(run({"simulate", "--config", cfg.string()}).code, 1);
}

TEST(Cli, SimulateTsvDeterministic) {
    const auto cfg = scratch("sim.json");
    write_file_atomic(cfg, R"({"replications": 3, "methods": ["conjugate", "t2", "mhde"],
                               "dp_mcmc": {"iterations": 300, "burn_in": 100, "thin": 10}})");
    const auto a = run({"simulate", "--config", cfg.string()});
    const auto b = run({"--threads", "2", "simulate", "--config", cfg.string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "method\tk\tshift\tbias\tsd\tcoverage\tlength\treps");
}

TEST(Cli, FitSummaryFields) {
    const auto data = scratch("fit.csv");
    write_file_atomic(data, "x\n4.2\n5.1\n5.9\n4.7\n5.3\n4.9\n5.6\n4.4\n");
    const auto out = scratch("fit.json");
    const auto r = run({"fit", "--data", data.string(), "--iters", "400", "--burn", "100", "--thin", "10", "--steps",
                        "1000", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out));
    for (const char* key : {"eap", "ci", "sd", "acceptance_rate", "ensemble_size", "pool_size"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j.at("ensemble_size").get<int>(), 30);
    EXPECT_EQ(j.at("pool_size").get<int>(), 30 * 50);
}

TEST(Cli, EstimateWithSavedEnsemble) {
    const auto data = scratch("est.csv");
    write_file_atomic(data, "4.2\n5.1\n5.9\n4.7\n5.3\n4.9\n5.6\n4.4\n");
    const auto ens = scratch("ens.json");
    ASSERT_EQ(run({"dpmix", "--data", data.string(), "--iters", "300", "--burn", "100", "--thin", "10", "--out",
                   ens.string()})
                  .code,
              0);
    const auto r = run({"estimate", "--method", "t3", "--data", data.string(), "--ensemble", ens.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("ensemble_size").get<int>(), 20);
    EXPECT_TRUE(j.contains("epsilon"));
    const auto g = run({"hellinger", "--g", "ensemble:" + ens.string(), "--f", "normal-loc:5"});
    EXPECT_EQ(g.code, 0) << g.err;
}

TEST(Cli, RealDataOutputs) {
    const auto out = scratch("posterior.json");
    const auto r = run({"realdata", "--csv", std::string(HELLBAYES_TEST_DATA) + "/horses.csv", "--iters", "400",
                        "--burn", "100", "--thin", "10", "--steps", "1000", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_NEAR(j.at("classical").at("all").at("mean").get<double>(), -1.848, 1e-3);
    EXPECT_EQ(j.at("classical").at("excluded").at(0).get<std::string>(), "5");
    EXPECT_NEAR(j.at("classical").at("without_excluded").at("sd").get<double>(), 0.556, 1e-3);
    EXPECT_EQ(j.at("hellinger").at("eap").size(), 2u);
    EXPECT_TRUE(std::filesystem::exists(scratch("posterior_mu.csv")));
    EXPECT_EQ(slurp(scratch("posterior_sigma.csv")).substr(0, 14), "sigma,density\n");
}

TEST(Cli, ThreadsEnvironmentValidated) {
    setenv("HELLBAYES_THREADS", "zero", 1);
    EXPECT_EQ(run({"hellinger", "--g", "normal:0,1", "--f", "normal-loc:1"}).code, 1);
    unsetenv("HELLBAYES_THREADS");
}
