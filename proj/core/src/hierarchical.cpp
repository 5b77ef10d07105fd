#include "hellbayes/hierarchical.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "hellbayes/error.hpp"
#include "hellbayes/parallel.hpp"
#include "hellbayes/stats.hpp"

namespace hellbayes {

void PriorSpec::validate(const ParametricFamily& family) const {
    if (!std::isfinite(location_mean)) throw ConfigError("prior mean must be finite");
    if (!(location_variance > 0.0)) throw ConfigError("prior variance must be positive");
    if (family.has_scale() && (!(scale_shape > 0.0) || !(scale_rate > 0.0))) {
        throw ConfigError("scale prior shape and rate must be positive");
    }
}

double PriorSpec::log_density(const ParametricFamily& family, const ParamVector& theta) const {
    double out = normal_log_pdf(theta[0], location_mean, location_variance);
    if (family.has_scale()) {
        const double s2 = theta[1] * theta[1];
        out += scale_shape * std::log(scale_rate) - std::lgamma(scale_shape) +
               (scale_shape - 1.0) * std::log(s2) - scale_rate * s2;
    }
    return out;
}

std::vector<double> ThetaSamplePool::coordinate(std::size_t c) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = samples[i * dimension + c];
    return out;
}

double ThetaSamplePool::mean_acceptance() const {
    if (acceptance_rates.empty()) return 0.0;
    return hellbayes::mean(acceptance_rates);
}

double hellinger_log_kernel(const ParamVector& theta, const RootDensity& g, double n,
                            const PriorSpec& prior, const ParametricFamily& family) {
    if (!family.in_bounds(theta)) return kNegInf;
    return prior.log_density(family, theta) - 2.0 * n * g.hellinger_sq(family, theta);
}

double hellinger_log_kernel(const ParamVector& theta, const GaussianMixtureDensity& g, double n,
                            const PriorSpec& prior, const ParametricFamily& family, const GridPtr& grid) {
    return hellinger_log_kernel(theta, RootDensity::from(g, grid), n, prior, family);
}

void MetropolisConfig::validate(const ParametricFamily& family) const {
    if (steps < 100) throw ConfigError("Metropolis chain needs at least 100 steps");
    if (thin < 1) throw ConfigError("thin must be at least 1");
    if (effective_burn_in() >= steps) throw ConfigError("burn-in must be shorter than the chain");
    if (proposal_sd.size() != family.dimension()) {
        throw ConfigError("one proposal sd per parameter coordinate required");
    }
    for (double s : proposal_sd) {
        if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("proposal sd must be positive");
    }
}

ChainResult metropolis_chain(const RootDensity& g, double n, const PriorSpec& prior,
                             const ParametricFamily& family, const MetropolisConfig& config,
                             const ParamVector& initial) {
    config.validate(family);
    prior.validate(family);
    if (!(n >= 0.0)) throw ConfigError("sample size must be nonnegative");
    family.require_in_bounds(initial);

    const std::size_t dim = family.dimension();
    std::optional<LocationAffinityProfile> profile;
    if (!family.has_scale()) profile.emplace(g, family.known_sigma());

    // Chain coordinates: (mu) or (mu, sigma^2).
    auto to_theta = [&](const ParamVector& u) {
        if (!family.has_scale()) return u;
        return ParamVector{u[0], u[1] > 0.0 ? std::sqrt(u[1]) : 0.0};
    };
    auto log_target = [&](const ParamVector& u) {
        const ParamVector theta = to_theta(u);
        if (!family.in_bounds(theta)) return kNegInf;
        const double d = profile ? profile->hellinger_sq(theta[0]) : g.hellinger_sq(family, theta);
        return prior.log_density(family, theta) - 2.0 * n * d;
    };
    auto propose = [&](const ParamVector& u, Rng& rng) {
        ParamVector next = u;
        for (std::size_t c = 0; c < dim; ++c) next[c] += sample_normal(rng, 0.0, config.proposal_sd[c]);
        return next;
    };

    Rng rng(config.seed);
    ParamVector state = family.has_scale() ? ParamVector{initial[0], initial[1] * initial[1]} : initial;
    double current = log_target(state);
    if (current == kNegInf) throw NumericError("initial state has zero target density");

    const int burn = config.effective_burn_in();
    ChainResult out;
    out.dimension = dim;
    out.draws.reserve(static_cast<std::size_t>((config.steps - burn) / config.thin + 1) * dim);
    long accepted = 0;
    for (int step = 0; step < config.steps; ++step) {
        if (metropolis_step(state, current, log_target, propose, rng)) ++accepted;
        if (step >= burn && (step - burn) % config.thin == 0) {
            const ParamVector theta = to_theta(state);
            out.draws.insert(out.draws.end(), theta.begin(), theta.end());
        }
    }
    out.acceptance_rate = static_cast<double>(accepted) / config.steps;
    return out;
}

ThetaSamplePool hierarchical_posterior(const DensityEnsemble& ensemble, double n, const PriorSpec& prior,
                                       const ParametricFamily& family, const GridPtr& grid,
                                       const HierarchicalOptions& options) {
    if (ensemble.empty()) throw ConfigError("hierarchical posterior needs a nonempty ensemble");
    options.chain.validate(family);

    ParamVector initial;
    if (options.initial) {
        initial = *options.initial;
    } else {
        const auto mean_root = RootDensity::from(posterior_mean_density(ensemble, grid));
        initial = family.has_scale()
                      ? ParamVector{mean_root.quantile(0.5),
                                    std::max(1.4826 * mean_root.mad(), 2.0 * family.scale_lower_bound() + 1e-6)}
                      : ParamVector{mean_root.quantile(0.5)};
    }

    std::vector<ChainResult> chains(ensemble.size());
    parallel_for(ensemble.size(), options.threads, [&](std::size_t j) {
        const auto root = RootDensity::from(ensemble.draws[j], grid);
        MetropolisConfig cfg = options.chain;
        cfg.seed = options.shared_chain_seed ? options.chain.seed : options.chain.seed ^ j;
        chains[j] = metropolis_chain(root, n, prior, family, cfg, initial);
    });

    ThetaSamplePool pool;
    pool.dimension = family.dimension();
    pool.seed = options.chain.seed;
    for (const ChainResult& chain : chains) {
        pool.samples.insert(pool.samples.end(), chain.draws.begin(), chain.draws.end());
        pool.per_g_counts.push_back(chain.draws.size() / chain.dimension);
        pool.acceptance_rates.push_back(chain.acceptance_rate);
    }
    return pool;
}

PosteriorSummary eap_and_ci(const ThetaSamplePool& pool) {
    if (pool.size() < kMinPoolSize) throw ConfigError("posterior summary needs at least 100 draws");
    PosteriorSummary s;
    s.eap = ParamVector(pool.dimension);
    for (std::size_t c = 0; c < pool.dimension; ++c) {
        const auto xs = pool.coordinate(c);
        s.eap[c] = mean(xs);
        s.ci_low.push_back(quantile(xs, 0.025));
        s.ci_high.push_back(quantile(xs, 0.975));
        s.sd.push_back(sample_sd(xs));
        if (!(s.ci_low[c] <= s.eap[c] && s.eap[c] <= s.ci_high[c])) s.eap_inside_ci = false;
    }
    return s;
}

std::pair<double, double> ConjugateNormalPosterior::credible_interval(double level) const {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
    const boost::math::normal_distribution<double> dist(mean_, sd_);
    const double tail = 0.5 * (1.0 - level);
    return {boost::math::quantile(dist, tail), boost::math::quantile(boost::math::complement(dist, tail))};
}

std::vector<double> ConjugateNormalPosterior::sample(Rng& rng, std::size_t count) const {
    std::vector<double> out(count);
    for (double& x : out) x = sample_normal(rng, mean_, sd_);
    return out;
}

ConjugateNormalPosterior conjugate_normal_posterior(std::span<const double> data, double prior_mean,
                                                    double prior_var, double known_sigma) {
    if (data.empty()) throw ConfigError("conjugate posterior needs at least one observation");
    if (!(known_sigma > 0.0)) throw ConfigError("known sigma must be positive");
    if (!(prior_var > 0.0)) throw ConfigError("prior variance must be positive");
    const double n = static_cast<double>(data.size());
    const double s2 = known_sigma * known_sigma;
    const double precision = 1.0 / prior_var + n / s2;
    double sum = 0.0;
    for (double x : data) sum += x;
    const double post_mean = (prior_mean / prior_var + sum / s2) / precision;
    return {post_mean, std::sqrt(1.0 / precision)};
}

ReferencePosterior clean_subset_reference_posterior(const DensityEnsemble& clean_ensemble,
                                                    std::size_t n_clean, std::size_t n_total,
                                                    const PriorSpec& prior, const ParametricFamily& family,
                                                    const GridPtr& grid, const HierarchicalOptions& options,
                                                    int beta_draws, std::optional<double> force_b) {
    if (n_clean >= n_total) throw ConfigError("clean subset must be smaller than the full sample");
    if (beta_draws < 1) throw ConfigError("need at least one tempering draw");
    if (force_b && !(*force_b > 0.0 && *force_b <= 1.0)) throw ConfigError("forced b must lie in (0, 1]");

    ReferencePosterior out;
    out.pool.dimension = family.dimension();
    out.pool.seed = options.chain.seed;
    Rng rng(derive_seed(options.chain.seed, 0xbe7a));
    const double a = static_cast<double>(n_clean) + 1.0;
    const double b = static_cast<double>(n_total - n_clean);
    for (int m = 0; m < beta_draws; ++m) {
        const double draw = force_b ? *force_b : sample_beta(rng, a, b);
        out.b_draws.push_back(draw);
        HierarchicalOptions opts = options;
        opts.chain.seed = derive_seed(options.chain.seed, static_cast<std::uint64_t>(m) + 1);
        const double n_eff = std::sqrt(draw) * static_cast<double>(n_total);
        const auto pool = hierarchical_posterior(clean_ensemble, n_eff, prior, family, grid, opts);
        out.pool.samples.insert(out.pool.samples.end(), pool.samples.begin(), pool.samples.end());
        out.pool.per_g_counts.insert(out.pool.per_g_counts.end(), pool.per_g_counts.begin(), pool.per_g_counts.end());
        out.pool.acceptance_rates.insert(out.pool.acceptance_rates.end(), pool.acceptance_rates.begin(),
                                         pool.acceptance_rates.end());
    }
    return out;
}

ReferencePosterior clean_subset_reference_posterior(std::span<const double> clean_data, std::size_t n_total,
                                                    const PriorSpec& prior, const ParametricFamily& family,
                                                    const DpPriorConfig& dp_prior, const McmcConfig& dp_mcmc,
                                                    const GridPtr& grid, const HierarchicalOptions& options,
                                                    int beta_draws, std::optional<double> force_b) {
    if (clean_data.size() >= n_total) throw ConfigError("clean subset must be smaller than the full sample");
    const auto ensemble = run_blocked_gibbs_ensemble(clean_data, dp_prior, dp_mcmc);
    return clean_subset_reference_posterior(ensemble, clean_data.size(), n_total, prior, family, grid, options,
                                            beta_draws, force_b);
}

}  // namespace hellbayes
