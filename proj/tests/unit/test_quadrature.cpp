#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hellbayes/error.hpp"
#include "hellbayes/quadrature.hpp"

using namespace hellbayes;

TEST(Quadrature, GridFromData) {
    const std::vector<double> one{0.0};
    auto g = build_grid(one, 32, 10.0);
    EXPECT_DOUBLE_EQ(g->lower(), -10.0);
    EXPECT_DOUBLE_EQ(g->upper(), 10.0);
    const std::vector<double> two{-3.0, 7.0};
    g = build_grid(two, 32, 10.0);
    EXPECT_DOUBLE_EQ(g->lower(), -13.0);
    EXPECT_DOUBLE_EQ(g->upper(), 17.0);
    EXPECT_EQ(g->size() % 2, 1u);
}

TEST(Quadrature, ExactOnConstantsAndCubics) {
    for (std::size_t n : {3u, 10u, 101u, 4096u}) {
        const QuadratureGrid g(-2.5, 4.0, n);
        EXPECT_EQ(g.size() % 2, 1u);
        EXPECT_GE(g.size(), n);
        EXPECT_NEAR(g.integrate([](double) { return 1.0; }), 6.5, 1e-9);
        // Simpson integrates cubics exactly.
        EXPECT_NEAR(g.integrate([](double x) { return x * x * x - x; }), (std::pow(4.0, 4) - std::pow(2.5, 4)) / 4 -
                                                                            (16.0 - 6.25) / 2,
                    1e-9);
    }
}

TEST(Quadrature, NearestIndexClamps) {
    const QuadratureGrid g(0.0, 1.0, 11);
    EXPECT_EQ(g.nearest_index(-5.0), 0u);
    EXPECT_EQ(g.nearest_index(5.0), g.size() - 1);
    EXPECT_EQ(g.nearest_index(0.52), 5u);
}

TEST(Quadrature, RejectsBadInput) {
    const std::vector<double> empty;
    EXPECT_THROW(build_grid(empty, 32, 10.0), ConfigError);
    const std::vector<double> one{0.0};
    EXPECT_THROW(build_grid(one, 4, 10.0), ConfigError);
    EXPECT_THROW(build_grid(one, 32, 0.0), ConfigError);
}
