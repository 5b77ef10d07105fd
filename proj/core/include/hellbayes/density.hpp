#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hellbayes/quadrature.hpp"
#include "hellbayes/random.hpp"

namespace hellbayes {

/// A univariate density evaluator. Must return finite nonnegative values.
using DensityFn = std::function<double(double)>;

/// Finite Gaussian mixture: sum_k w_k N(x; mean_k, var_k).
class GaussianMixtureDensity {
public:
    GaussianMixtureDensity() = default;
    /// Throws ConfigError unless lengths agree, weights form a simplex
    /// (within 1e-12) and every variance is positive.
    GaussianMixtureDensity(std::vector<double> weights, std::vector<double> means,
                           std::vector<double> variances);

    static GaussianMixtureDensity normal(double mean, double sd);

    std::size_t components() const noexcept { return weights_.size(); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& means() const noexcept { return means_; }
    const std::vector<double>& variances() const noexcept { return variances_; }

    double operator()(double x) const;
    std::vector<double> evaluate(const QuadratureGrid& grid) const;

    /// Range [min(mean_k - sds*sd_k), max(mean_k + sds*sd_k)] over components
    /// carrying non-negligible weight.
    std::pair<double, double> support_range(double sds = 8.0) const;

    friend bool operator==(const GaussianMixtureDensity&, const GaussianMixtureDensity&) = default;

private:
    std::vector<double> weights_;
    std::vector<double> means_;
    std::vector<double> variances_;
};

double eval_mixture(const GaussianMixtureDensity& m, double x);

/// Grid covering +-sds standard deviations of every weighted component.
GridPtr covering_grid(const GaussianMixtureDensity& m, int nodes_per_unit = 64, double sds = 8.0);

struct EnsembleMeta {
    std::uint64_t seed = 0;
    int iterations = 0;
    int burn_in = 0;
    int thin = 1;
    std::vector<int> source_iterations;
};

/// Sampled posterior over densities, in draw order.
struct DensityEnsemble {
    std::vector<GaussianMixtureDensity> draws;
    EnsembleMeta meta;

    std::size_t size() const noexcept { return draws.size(); }
    bool empty() const noexcept { return draws.empty(); }
};

/// Density values on the nodes of a shared grid.
class GridDensity {
public:
    GridDensity(GridPtr grid, std::vector<double> values);

    const QuadratureGrid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Quadrature mass on the grid. Mass outside the grid range is not seen.
    double mass() const;
    double leaked_mass() const { return 1.0 - mass(); }

    /// Piecewise-linear interpolation; zero outside the grid range.
    double operator()(double x) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Pointwise mean of the ensemble draws on the grid (g*_n).
GridDensity posterior_mean_density(const DensityEnsemble& ensemble, const GridPtr& grid);

struct BandwidthRule {
    enum class Kind { Silverman, Fixed };
    Kind kind = Kind::Silverman;
    double value = 0.0;

    static BandwidthRule silverman() { return {Kind::Silverman, 0.0}; }
    static BandwidthRule fixed(double h) { return {Kind::Fixed, h}; }
};

inline constexpr double kKdeFallbackBandwidth = 1e-3;

/// Gaussian-kernel density estimate.
struct KdeDensity {
    std::vector<double> data;
    double bandwidth = 0.0;
    /// Non-empty when the bandwidth rule degenerated and a fallback was used.
    std::string warning;

    double operator()(double x) const;
};

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); IQR from type-7 quantiles.
double silverman_bandwidth(std::span<const double> data);

KdeDensity kde(std::span<const double> data, const BandwidthRule& rule);

/// Histogram density f(x) = probs[i] / h on bins (origin + i h, origin + (i+1) h].
struct RandomHistogramDensity {
    double bin_width = 1.0;
    double origin = 0.0;
    std::vector<double> bin_probs;

    double operator()(double x) const;
    /// Bin index of x, or nullopt when x lies outside the indexed range.
    std::optional<std::size_t> bin_of(double x) const;
};

struct HistogramRange {
    double origin;
    std::size_t bins;
};

/// Dirichlet posterior over bin probabilities for a fixed bin width.
class RandomHistogramPosterior {
public:
    RandomHistogramPosterior(double bin_width, double origin, std::vector<double> base_weights,
                             std::vector<double> counts, std::size_t n);

    double bin_width() const noexcept { return bin_width_; }
    double origin() const noexcept { return origin_; }
    const std::vector<double>& base_weights() const noexcept { return base_; }
    const std::vector<double>& counts() const noexcept { return counts_; }

    /// Posterior mean: probs proportional to base weight + count.
    RandomHistogramDensity mean() const;
    RandomHistogramDensity sample(Rng& rng) const;

    /// log p(data | h), Dirichlet-multinomial with the 1/h^n histogram factor.
    double log_marginal_likelihood() const;

private:
    double bin_width_;
    double origin_;
    std::vector<double> base_;
    std::vector<double> counts_;
    std::size_t n_;
};

/// Default range: bins aligned to multiples of h covering [min(data) - h, max(data) + h].
/// Throws ConfigError for h <= 0 or data outside an explicit range.
RandomHistogramPosterior random_histogram_posterior(std::span<const double> data, double h,
                                                    double base_weight_per_bin,
                                                    std::optional<HistogramRange> range = std::nullopt);
RandomHistogramPosterior random_histogram_posterior(std::span<const double> data, double h,
                                                    std::vector<double> base_weights,
                                                    HistogramRange range);

/// Picks the bin width with largest marginal likelihood; per-bin base weight
/// is base_density * h so the base measure does not depend on h.
RandomHistogramPosterior select_histogram_posterior(std::span<const double> data,
                                                    std::span<const double> candidate_widths,
                                                    double base_density = 0.1);

}  // namespace hellbayes
