#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hellbayes/density.hpp"
#include "hellbayes/random.hpp"

namespace hellbayes {

/// Truncated DP mixture of normals with a normal-inverse-gamma base measure:
///   mu | var ~ N(m1, var / kappa0),  var ~ InvGamma(nu1 / 2, psi1 / 2),
///   kappa0 ~ Gamma(kappa0_shape, rate = kappa0_rate).
struct DpPriorConfig {
    double mass = 1.0;
    double m1 = 0.0;
    double kappa0_shape = 0.5;
    double kappa0_rate = 50.0;
    double nu1 = 4.0;
    double psi1 = 2.0;
    int truncation = 30;
    /// Holds kappa0 at this value instead of sampling it.
    std::optional<double> fixed_kappa0;

    /// Throws ConfigError. A truncation of 1 is accepted (single atom).
    void validate() const;
};

struct McmcConfig {
    int iterations = 2000;
    int burn_in = 500;
    int thin = 15;
    std::uint64_t seed = 0;

    void validate() const;
    /// Number of retained draws.
    int retained() const noexcept;
};

struct GibbsState {
    std::vector<int> assignments;
    std::vector<double> atom_means;
    std::vector<double> atom_vars;
    std::vector<double> sticks;
    std::vector<double> weights;
    double kappa0 = 0.0;
};

struct GibbsDiagnostics {
    /// Atom variances floored at kVarianceFloor.
    long variance_floor_hits = 0;
    int min_occupied = 0;
    int max_occupied = 0;
    std::vector<double> kappa0_trace;
};

struct DpFit {
    DensityEnsemble ensemble;
    GibbsDiagnostics diagnostics;
    GibbsState final_state;
};

inline constexpr double kVarianceFloor = 1e-10;

/// w_k = v_k prod_{j<k} (1 - v_j) for k < K-1; the last weight takes the
/// remainder so the result sums to one. Output length is sticks.size() + 1.
/// Throws ConfigError for a stick outside (0, 1).
std::vector<double> stick_breaking_weights(std::span<const double> sticks);

/// Blocked Gibbs sampler over the truncated stick-breaking representation.
/// Each iteration updates assignments, atoms (conjugate normal-inverse-gamma),
/// sticks (Beta(1 + n_k, M + sum_{j>k} n_j)) and kappa0 (conjugate gamma),
/// in that order. Deterministic for a given seed.
DpFit run_blocked_gibbs(std::span<const double> data, const DpPriorConfig& prior,
                        const McmcConfig& mcmc);

/// Convenience wrapper returning only the ensemble.
DensityEnsemble run_blocked_gibbs_ensemble(std::span<const double> data, const DpPriorConfig& prior,
                                           const McmcConfig& mcmc);

/// One draw from the truncated prior.
GaussianMixtureDensity prior_predictive_draw(const DpPriorConfig& prior, std::uint64_t seed);

}  // namespace hellbayes
