#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hellbayes/error.hpp"
#include "hellbayes/io.hpp"

using namespace hellbayes;

TEST(Csv, Datasets) {
    EXPECT_EQ(parse_dataset_csv("1.0\n2.5\n"), (std::vector<double>{1.0, 2.5}));
    EXPECT_EQ(parse_dataset_csv("x\n3\n"), (std::vector<double>{3.0}));
    EXPECT_EQ(parse_dataset_csv("\n-1e2\r\n\n"), (std::vector<double>{-100.0}));
    try {
        parse_dataset_csv("abc\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
    EXPECT_THROW(parse_dataset_csv("1\n2\nnan\n"), ConfigError);
}

TEST(Csv, HorsesFile) {
    const auto pc = load_paired_counts_csv(std::filesystem::path(HELLBAYES_TEST_DATA) / "horses.csv");
    EXPECT_EQ(pc.ids.size(), 7u);
    EXPECT_EQ(pc.before[4], 3260);
    EXPECT_EQ(pc.after[4], 60);
    EXPECT_THROW(parse_paired_counts_csv("a,b,c\n1,2,3\n"), ConfigError);
    EXPECT_THROW(parse_paired_counts_csv("id,before,after\n1,2\n"), ConfigError);
}

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
    const std::string s = dump_json(nlohmann::json{{"a", 0.1}, {"b", {1, 2}}});
    EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
}

TEST(Json, EnsembleRoundTrip) {
    DensityEnsemble e;
    e.draws = {GaussianMixtureDensity({0.25, 0.75}, {1.0 / 3.0, -2.0}, {0.7, 1.1}),
               GaussianMixtureDensity::normal(0.1, 2.0)};
    e.meta.seed = 17;
    e.meta.thin = 5;
    const auto text = dump_json(to_json(e));
    const auto back = ensemble_from_json(nlohmann::json::parse(text));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.draws[0], e.draws[0]);
    EXPECT_EQ(back.draws[1], e.draws[1]);
    EXPECT_EQ(back.meta.seed, 17u);
    EXPECT_THROW(ensemble_from_json(nlohmann::json::parse("{\"draws\": []}")), ConfigError);
}

TEST(Files, AtomicWrite) {
    const auto path = std::filesystem::temp_directory_path() / "hellbayes_io_test.txt";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    EXPECT_EQ(s, "second");
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove(path);
}
