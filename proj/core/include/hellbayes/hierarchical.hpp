#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hellbayes/density.hpp"
#include "hellbayes/dp_mixture.hpp"
#include "hellbayes/family.hpp"
#include "hellbayes/hellinger.hpp"
#include "hellbayes/random.hpp"

namespace hellbayes {

/// pi(theta): location ~ N(mean, variance); for location-scale families the
/// squared scale sigma^2 ~ Gamma(shape, rate).
struct PriorSpec {
    double location_mean = 0.0;
    double location_variance = 25.0;
    double scale_shape = 3.0;
    double scale_rate = 0.5;

    void validate(const ParametricFamily& family) const;
    /// Log density in the (location, sigma^2) coordinates.
    double log_density(const ParametricFamily& family, const ParamVector& theta) const;
};

/// Draws from the pooled hierarchical posterior, row-major (draw x coordinate),
/// in the family's (location[, sigma]) parameterization.
struct ThetaSamplePool {
    std::size_t dimension = 1;
    std::vector<double> samples;
    std::vector<std::size_t> per_g_counts;
    std::vector<double> acceptance_rates;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return dimension == 0 ? 0 : samples.size() / dimension; }
    std::vector<double> coordinate(std::size_t c) const;
    double mean_acceptance() const;
};

struct PosteriorSummary {
    ParamVector eap;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::vector<double> sd;
    /// True when ci_low <= eap <= ci_high in every coordinate.
    bool eap_inside_ci = true;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log pi(theta) - 2 n D_H(g, f_theta). Returns -infinity for an
/// out-of-bounds theta; Metropolis treats that as a rejection.
double hellinger_log_kernel(const ParamVector& theta, const RootDensity& g, double n,
                            const PriorSpec& prior, const ParametricFamily& family);
double hellinger_log_kernel(const ParamVector& theta, const GaussianMixtureDensity& g, double n,
                            const PriorSpec& prior, const ParametricFamily& family,
                            const GridPtr& grid);

/// One random-walk Metropolis update with a symmetric proposal.
/// Returns true when the proposal was accepted.
template <class State, class LogTarget, class Propose>
bool metropolis_step(State& state, double& log_target_value, LogTarget&& log_target,
                     Propose&& propose, Rng& rng) {
    State candidate = propose(state, rng);
    const double candidate_value = log_target(candidate);
    if (candidate_value == kNegInf) return false;
    const double log_u = std::log(sample_uniform(rng));
    if (log_u < candidate_value - log_target_value) {
        state = candidate;
        log_target_value = candidate_value;
        return true;
    }
    return false;
}

struct MetropolisConfig {
    int steps = 20000;
    /// Negative selects steps / 2.
    int burn_in = -1;
    int thin = 10;
    /// Per coordinate; the scale coordinate moves on sigma^2.
    std::vector<double> proposal_sd{0.5};
    std::uint64_t seed = 0;

    void validate(const ParametricFamily& family) const;
    int effective_burn_in() const noexcept { return burn_in < 0 ? steps / 2 : burn_in; }
};

struct ChainResult {
    std::size_t dimension = 1;
    std::vector<double> draws;
    double acceptance_rate = 0.0;
};

/// Random-walk Metropolis targeting pi(theta) exp(-2 n D_H(g, theta)).
/// For the location-only family the distance comes from a tabulated
/// LocationAffinityProfile; otherwise from RootDensity::affinity.
ChainResult metropolis_chain(const RootDensity& g, double n, const PriorSpec& prior,
                             const ParametricFamily& family, const MetropolisConfig& config,
                             const ParamVector& initial);

struct HierarchicalOptions {
    MetropolisConfig chain;
    /// Starting point of every chain; defaults to the median of g* and,
    /// for the scale coordinate, 1.4826 * MAD(g*).
    std::optional<ParamVector> initial;
    /// Use chain.seed for every chain instead of chain.seed ^ j.
    bool shared_chain_seed = false;
    /// Workers for the per-draw chains; 1 keeps everything on the caller's thread.
    int threads = 1;
};

/// One chain per ensemble draw g_j with seed chain.seed ^ j, pooled in draw order.
ThetaSamplePool hierarchical_posterior(const DensityEnsemble& ensemble, double n,
                                       const PriorSpec& prior, const ParametricFamily& family,
                                       const GridPtr& grid, const HierarchicalOptions& options);

inline constexpr std::size_t kMinPoolSize = 100;

/// Mean, type-7 2.5/97.5% quantiles and sample sd per coordinate.
/// Throws ConfigError below kMinPoolSize draws.
PosteriorSummary eap_and_ci(const ThetaSamplePool& pool);

class ConjugateNormalPosterior {
public:
    ConjugateNormalPosterior(double mean, double sd) : mean_(mean), sd_(sd) {}

    double mean() const noexcept { return mean_; }
    double sd() const noexcept { return sd_; }
    /// Central interval from normal quantiles.
    std::pair<double, double> credible_interval(double level = 0.95) const;
    std::vector<double> sample(Rng& rng, std::size_t count) const;

private:
    double mean_;
    double sd_;
};

/// Normal mean with known sigma and N(prior_mean, prior_var) prior.
ConjugateNormalPosterior conjugate_normal_posterior(std::span<const double> data, double prior_mean,
                                                    double prior_var, double known_sigma);

struct ReferencePosterior {
    ThetaSamplePool pool;
    std::vector<double> b_draws;
};

/// Limit posterior that ignores outliers: for b_m ~ Beta(n1 + 1, n_total - n1),
/// the hierarchical posterior on the clean data with the sample size replaced
/// by sqrt(b_m) * n_total; all draws pooled. `force_b` pins every b_m.
ReferencePosterior clean_subset_reference_posterior(const DensityEnsemble& clean_ensemble,
                                                    std::size_t n_clean, std::size_t n_total,
                                                    const PriorSpec& prior,
                                                    const ParametricFamily& family,
                                                    const GridPtr& grid,
                                                    const HierarchicalOptions& options,
                                                    int beta_draws,
                                                    std::optional<double> force_b = std::nullopt);

/// Same, starting from the clean observations: fits the DP mixture first.
ReferencePosterior clean_subset_reference_posterior(std::span<const double> clean_data,
                                                    std::size_t n_total, const PriorSpec& prior,
                                                    const ParametricFamily& family,
                                                    const DpPriorConfig& dp_prior,
                                                    const McmcConfig& dp_mcmc, const GridPtr& grid,
                                                    const HierarchicalOptions& options,
                                                    int beta_draws,
                                                    std::optional<double> force_b = std::nullopt);

}  // namespace hellbayes
