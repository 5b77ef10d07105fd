#include "hellbayes/dp_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hellbayes/error.hpp"
#include "hellbayes/stats.hpp"

namespace hellbayes {

void DpPriorConfig::validate() const {
    if (!(mass > 0.0)) throw ConfigError("DP mass must be positive");
    if (!std::isfinite(m1)) throw ConfigError("m1 must be finite");
    if (!(kappa0_shape > 0.0) || !(kappa0_rate > 0.0)) throw ConfigError("kappa0 hyperparameters must be positive");
    if (!(nu1 > 1.0)) throw ConfigError("nu1 must exceed 1");
    if (!(psi1 > 0.0)) throw ConfigError("psi1 must be positive");
    if (truncation < 1) throw ConfigError("truncation must be at least 1");
    if (fixed_kappa0 && !(*fixed_kappa0 > 0.0)) throw ConfigError("fixed kappa0 must be positive");
}

void McmcConfig::validate() const {
    if (iterations < 1) throw ConfigError("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) throw ConfigError("burn-in must lie in [0, iterations)");
    if (thin < 1) throw ConfigError("thin must be at least 1");
}

int McmcConfig::retained() const noexcept {
    return (iterations - burn_in + thin - 1) / thin;
}

std::vector<double> stick_breaking_weights(std::span<const double> sticks) {
    std::vector<double> w(sticks.size() + 1);
    double remaining = 1.0;
    for (std::size_t k = 0; k < sticks.size(); ++k) {
        const double v = sticks[k];
        if (!(v > 0.0 && v < 1.0)) throw ConfigError("stick fraction outside (0, 1)");
        w[k] = v * remaining;
        remaining -= w[k];
    }
    w.back() = std::max(0.0, remaining);
    return w;
}

namespace {

// Beta draws are kept strictly inside (0, 1).
double clamp_stick(double v) {
    constexpr double eps = 0x1p-53;
    return std::clamp(v, std::numeric_limits<double>::min(), 1.0 - eps);
}

class BlockedGibbs {
public:
    BlockedGibbs(std::span<const double> data, const DpPriorConfig& prior, Rng& rng)
        : x_(data), prior_(prior), rng_(rng), K_(static_cast<std::size_t>(prior.truncation)) {
        a0_ = prior.nu1 / 2.0;
        b0_ = prior.psi1 / 2.0;
        init();
    }

    void sweep() {
        update_assignments();
        update_atoms();
        update_sticks();
        update_kappa0();
    }

    int occupied() const {
        return static_cast<int>(std::count_if(counts_.begin(), counts_.end(), [](int c) { return c > 0; }));
    }

    GaussianMixtureDensity snapshot() const {
        return {state_.weights, state_.atom_means, state_.atom_vars};
    }

    const GibbsState& state() const noexcept { return state_; }
    long floor_hits() const noexcept { return floor_hits_; }

private:
    void init() {
        const std::size_t n = x_.size();
        const double data_var = n > 1 ? std::max(sample_sd(x_) * sample_sd(x_), 1e-6) : b0_ / std::max(a0_ - 1.0, 0.5);
        state_.kappa0 = prior_.fixed_kappa0 ? *prior_.fixed_kappa0 : prior_.kappa0_shape / prior_.kappa0_rate;
        state_.atom_means.resize(K_);
        state_.atom_vars.assign(K_, data_var);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (auto& m : state_.atom_means) m = x_[pick(rng_)];
        // Sticks giving equal weights 1/K.
        state_.sticks.resize(K_ - 1);
        for (std::size_t k = 0; k + 1 < K_; ++k) state_.sticks[k] = 1.0 / static_cast<double>(K_ - k);
        state_.weights = stick_breaking_weights(state_.sticks);
        state_.assignments.assign(n, 0);
        counts_.assign(K_, 0);
        counts_[0] = static_cast<int>(n);
    }

    void update_assignments() {
        std::vector<double> logp(K_);
        std::vector<double> log_w(K_);
        std::vector<double> log_norm(K_);
        for (std::size_t k = 0; k < K_; ++k) {
            log_w[k] = state_.weights[k] > 0.0 ? std::log(state_.weights[k]) : -std::numeric_limits<double>::infinity();
            log_norm[k] = -kLogSqrt2Pi - 0.5 * std::log(state_.atom_vars[k]);
        }
        std::fill(counts_.begin(), counts_.end(), 0);
        for (std::size_t i = 0; i < x_.size(); ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K_; ++k) {
                const double d = x_[i] - state_.atom_means[k];
                logp[k] = log_w[k] + log_norm[k] - 0.5 * d * d / state_.atom_vars[k];
                mx = std::max(mx, logp[k]);
            }
            double total = 0.0;
            for (double& lp : logp) {
                lp = std::exp(lp - mx);
                total += lp;
            }
            double u = sample_uniform(rng_) * total;
            std::size_t z = 0;
            for (; z + 1 < K_; ++z) {
                u -= logp[z];
                if (u < 0.0) break;
            }
            // Never land on a zero-probability atom through rounding.
            while (logp[z] == 0.0 && z > 0) --z;
            state_.assignments[i] = static_cast<int>(z);
            ++counts_[z];
        }
    }

    void update_atoms() {
        std::vector<double> sum(K_, 0.0);
        for (std::size_t i = 0; i < x_.size(); ++i) sum[state_.assignments[i]] += x_[i];
        std::vector<double> ss(K_, 0.0);
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const auto k = static_cast<std::size_t>(state_.assignments[i]);
            const double d = x_[i] - sum[k] / counts_[k];
            ss[k] += d * d;
        }
        const double kappa0 = state_.kappa0;
        for (std::size_t k = 0; k < K_; ++k) {
            const double nk = counts_[k];
            const double xbar = nk > 0 ? sum[k] / nk : 0.0;
            const double kn = kappa0 + nk;
            const double mn = (kappa0 * prior_.m1 + nk * xbar) / kn;
            const double an = a0_ + 0.5 * nk;
            const double dm = xbar - prior_.m1;
            const double bn = b0_ + 0.5 * ss[k] + (nk > 0 ? 0.5 * kappa0 * nk * dm * dm / kn : 0.0);
            double var = sample_inverse_gamma(rng_, an, bn);
            if (!(var >= kVarianceFloor)) {
                var = kVarianceFloor;
                ++floor_hits_;
            }
            state_.atom_vars[k] = var;
            state_.atom_means[k] = sample_normal(rng_, mn, std::sqrt(var / kn));
        }
    }

    void update_sticks() {
        if (K_ == 1) return;
        int tail = static_cast<int>(x_.size());
        for (std::size_t k = 0; k + 1 < K_; ++k) {
            tail -= counts_[k];
            state_.sticks[k] = clamp_stick(sample_beta(rng_, 1.0 + counts_[k], prior_.mass + tail));
        }
        state_.weights = stick_breaking_weights(state_.sticks);
    }

    void update_kappa0() {
        if (prior_.fixed_kappa0) return;
        double rate = prior_.kappa0_rate;
        for (std::size_t k = 0; k < K_; ++k) {
            const double d = state_.atom_means[k] - prior_.m1;
            rate += 0.5 * d * d / state_.atom_vars[k];
        }
        state_.kappa0 = sample_gamma(rng_, prior_.kappa0_shape + 0.5 * static_cast<double>(K_), rate);
    }

    std::span<const double> x_;
    const DpPriorConfig& prior_;
    Rng& rng_;
    std::size_t K_;
    double a0_;
    double b0_;
    GibbsState state_;
    std::vector<int> counts_;
    long floor_hits_ = 0;
};

}  // namespace

DpFit run_blocked_gibbs(std::span<const double> data, const DpPriorConfig& prior, const McmcConfig& mcmc) {
    if (data.empty()) throw ConfigError("DP mixture needs at least one observation");
    prior.validate();
    mcmc.validate();
    for (double x : data) {
        if (!std::isfinite(x)) throw ConfigError("data contain a non-finite value");
    }
    Rng rng(mcmc.seed);
    BlockedGibbs sampler(data, prior, rng);

    DpFit fit;
    fit.ensemble.meta = {mcmc.seed, mcmc.iterations, mcmc.burn_in, mcmc.thin, {}};
    fit.ensemble.draws.reserve(static_cast<std::size_t>(mcmc.retained()));
    fit.diagnostics.min_occupied = std::numeric_limits<int>::max();
    for (int it = 0; it < mcmc.iterations; ++it) {
        sampler.sweep();
        const int occ = sampler.occupied();
        fit.diagnostics.min_occupied = std::min(fit.diagnostics.min_occupied, occ);
        fit.diagnostics.max_occupied = std::max(fit.diagnostics.max_occupied, occ);
        fit.diagnostics.kappa0_trace.push_back(sampler.state().kappa0);
        if (it >= mcmc.burn_in && (it - mcmc.burn_in) % mcmc.thin == 0) {
            fit.ensemble.draws.push_back(sampler.snapshot());
            fit.ensemble.meta.source_iterations.push_back(it);
        }
    }
    fit.diagnostics.variance_floor_hits = sampler.floor_hits();
    fit.final_state = sampler.state();
    return fit;
}

DensityEnsemble run_blocked_gibbs_ensemble(std::span<const double> data, const DpPriorConfig& prior,
                                           const McmcConfig& mcmc) {
    return run_blocked_gibbs(data, prior, mcmc).ensemble;
}

GaussianMixtureDensity prior_predictive_draw(const DpPriorConfig& prior, std::uint64_t seed) {
    prior.validate();
    Rng rng(seed);
    const auto K = static_cast<std::size_t>(prior.truncation);
    const double kappa0 =
        prior.fixed_kappa0 ? *prior.fixed_kappa0 : sample_gamma(rng, prior.kappa0_shape, prior.kappa0_rate);
    std::vector<double> sticks(K - 1);
    for (double& v : sticks) v = clamp_stick(sample_beta(rng, 1.0, prior.mass));
    std::vector<double> means(K);
    std::vector<double> vars(K);
    for (std::size_t k = 0; k < K; ++k) {
        vars[k] = std::max(sample_inverse_gamma(rng, prior.nu1 / 2.0, prior.psi1 / 2.0), kVarianceFloor);
        means[k] = sample_normal(rng, prior.m1, std::sqrt(vars[k] / kappa0));
    }
    return {stick_breaking_weights(sticks), std::move(means), std::move(vars)};
}

}  // namespace hellbayes
