#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "hellbayes/density.hpp"
#include "hellbayes/family.hpp"
#include "hellbayes/hellinger.hpp"
#include "hellbayes/minimize.hpp"

namespace hellbayes {

enum class EstimatorMethod { Theta1, Theta2, Theta3, ClassicalMhde };

std::string_view to_string(EstimatorMethod m) noexcept;
/// Accepts the CLI tags t1, t2, t3, mhde.
EstimatorMethod parse_estimator_method(std::string_view tag);

struct EstimatorResult {
    ParamVector theta;
    EstimatorMethod method = EstimatorMethod::Theta1;
    double objective_value = 0.0;
    std::size_t ensemble_size = 0;
    std::optional<double> epsilon;
};

struct EstimatorOptions {
    MinimizeOptions minimize;
    /// Points per coordinate of the deterministic search used by theta_hat_3.
    /// Zero selects 2001 (step = width / 2000) in one dimension and 201 in two.
    int theta3_points = 0;
};

/// log(n) / sqrt(n)
double default_epsilon(std::size_t n);

/// Location: [min - 2s, max + 2s]; scale: [max(0.02 s, lower bound), 10 s],
/// with s the sample sd (1 when undefined or zero).
SearchBox default_search_box(const ParametricFamily& family, std::span<const double> data);

/// argmin_theta D_H(f_theta, g*_n), g*_n the posterior mean density.
EstimatorResult theta_hat_1(const DensityEnsemble& ensemble, const ParametricFamily& family,
                            const GridPtr& grid, const SearchBox& box,
                            const EstimatorOptions& options = {});

/// argmin_theta (1/J) sum_j D_H(g_j, f_theta).
EstimatorResult theta_hat_2(const DensityEnsemble& ensemble, const ParametricFamily& family,
                            const GridPtr& grid, const SearchBox& box,
                            const EstimatorOptions& options = {});

/// argmin_theta (1/J) #{j : D_H(g_j, f_theta) > epsilon}.
///
/// Evaluated on a deterministic grid over the box. Among grid points with the
/// smallest exceedance fraction, the one with the smallest mean distance
/// wins; that point is then polished by golden section on the mean distance
/// within its neighbouring cells, keeping the exceedance fraction minimal.
/// Throws ConfigError for epsilon <= 0.
EstimatorResult theta_hat_3(const DensityEnsemble& ensemble, const ParametricFamily& family,
                            const GridPtr& grid, const SearchBox& box, double epsilon,
                            const EstimatorOptions& options = {});

/// Minimum Hellinger distance against a Gaussian kernel density estimate.
EstimatorResult classical_mhde(std::span<const double> data, const ParametricFamily& family,
                               const BandwidthRule& rule, const GridPtr& grid, const SearchBox& box,
                               const EstimatorOptions& options = {});

}  // namespace hellbayes
