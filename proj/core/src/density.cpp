#include "hellbayes/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hellbayes/error.hpp"
#include "hellbayes/stats.hpp"

namespace hellbayes {

GaussianMixtureDensity::GaussianMixtureDensity(std::vector<double> weights, std::vector<double> means,
                                               std::vector<double> variances)
    : weights_(std::move(weights)), means_(std::move(means)), variances_(std::move(variances)) {
    if (weights_.empty()) throw ConfigError("mixture needs at least one component");
    if (weights_.size() != means_.size() || weights_.size() != variances_.size()) {
        throw ConfigError("mixture weights, means and variances must have equal lengths");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("mixture weight must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mixture weights must sum to 1");
    for (double v : variances_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("mixture variance must be positive");
    }
    for (double m : means_) {
        if (!std::isfinite(m)) throw ConfigError("mixture mean must be finite");
    }
}

GaussianMixtureDensity GaussianMixtureDensity::normal(double mean, double sd) {
    return {{1.0}, {mean}, {sd * sd}};
}

double GaussianMixtureDensity::operator()(double x) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        if (weights_[k] > 0.0) sum += weights_[k] * normal_pdf(x, means_[k], variances_[k]);
    }
    return sum;
}

std::vector<double> GaussianMixtureDensity::evaluate(const QuadratureGrid& grid) const {
    const auto x = grid.nodes();
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        if (!(weights_[k] > 0.0)) continue;
        const double lw = std::log(weights_[k]) - kLogSqrt2Pi - 0.5 * std::log(variances_[k]);
        const double half_prec = 0.5 / variances_[k];
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - means_[k];
            out[i] += std::exp(lw - half_prec * d * d);
        }
    }
    return out;
}

std::pair<double, double> GaussianMixtureDensity::support_range(double sds) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        if (weights_[k] < 1e-14) continue;
        const double s = std::sqrt(variances_[k]);
        lo = std::min(lo, means_[k] - sds * s);
        hi = std::max(hi, means_[k] + sds * s);
    }
    return {lo, hi};
}

double eval_mixture(const GaussianMixtureDensity& m, double x) { return m(x); }

GridPtr covering_grid(const GaussianMixtureDensity& m, int nodes_per_unit, double sds) {
    const auto [lo, hi] = m.support_range(sds);
    // Keep at least ~200 nodes per standard deviation of the narrowest component.
    double narrowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m.components(); ++k) {
        if (m.weights()[k] >= 1e-14) narrowest = std::min(narrowest, std::sqrt(m.variances()[k]));
    }
    const double per_unit = std::max<double>(nodes_per_unit, 200.0 / narrowest);
    const auto nodes = static_cast<std::size_t>(std::ceil((hi - lo) * per_unit)) + 1;
    return std::make_shared<const QuadratureGrid>(lo, hi, std::min<std::size_t>(nodes, 2'000'001));
}

GridDensity::GridDensity(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw ConfigError("null grid");
    if (values_.size() != grid_->size()) throw ConfigError("grid density size mismatch");
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("grid density values must be nonnegative");
    }
}

double GridDensity::mass() const { return grid_->integrate(values_); }

double GridDensity::operator()(double x) const {
    const double a = grid_->lower();
    const double h = grid_->step();
    if (x < a || x > grid_->upper()) return 0.0;
    const double pos = (x - a) / h;
    const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

GridDensity posterior_mean_density(const DensityEnsemble& ensemble, const GridPtr& grid) {
    if (ensemble.empty()) throw ConfigError("posterior mean of an empty ensemble");
    std::vector<double> acc(grid->size(), 0.0);
    for (const auto& draw : ensemble.draws) {
        const auto v = draw.evaluate(*grid);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(ensemble.size());
    for (double& v : acc) v *= inv;
    return {grid, std::move(acc)};
}

double KdeDensity::operator()(double x) const {
    const double var = bandwidth * bandwidth;
    double sum = 0.0;
    for (double d : data) sum += normal_pdf(x, d, var);
    return sum / static_cast<double>(data.size());
}

double silverman_bandwidth(std::span<const double> data) {
    if (data.size() < 2) throw ConfigError("Silverman bandwidth needs at least two observations");
    const double sd = sample_sd(data);
    const double iqr = quantile(data, 0.75) - quantile(data, 0.25);
    return 0.9 * std::min(sd, iqr / 1.34) * std::pow(static_cast<double>(data.size()), -0.2);
}

KdeDensity kde(std::span<const double> data, const BandwidthRule& rule) {
    if (data.empty()) throw ConfigError("kernel density estimate of empty data");
    KdeDensity out;
    out.data.assign(data.begin(), data.end());
    if (rule.kind == BandwidthRule::Kind::Fixed) {
        if (!(rule.value > 0.0)) throw ConfigError("fixed bandwidth must be positive");
        out.bandwidth = rule.value;
        return out;
    }
    const double h = silverman_bandwidth(data);
    if (h > 0.0) {
        out.bandwidth = h;
    } else {
        out.bandwidth = kKdeFallbackBandwidth;
        out.warning = "degenerate Silverman bandwidth; using fixed 1e-3";
    }
    return out;
}

std::optional<std::size_t> RandomHistogramDensity::bin_of(double x) const {
    const double idx = std::ceil((x - origin) / bin_width) - 1.0;
    if (idx < 0.0 || idx >= static_cast<double>(bin_probs.size())) return std::nullopt;
    return static_cast<std::size_t>(idx);
}

double RandomHistogramDensity::operator()(double x) const {
    const auto bin = bin_of(x);
    return bin ? bin_probs[*bin] / bin_width : 0.0;
}

RandomHistogramPosterior::RandomHistogramPosterior(double bin_width, double origin,
                                                   std::vector<double> base_weights,
                                                   std::vector<double> counts, std::size_t n)
    : bin_width_(bin_width), origin_(origin), base_(std::move(base_weights)), counts_(std::move(counts)), n_(n) {
    if (!(bin_width_ > 0.0)) throw ConfigError("histogram bin width must be positive");
    if (base_.empty() || base_.size() != counts_.size()) throw ConfigError("histogram bin count mismatch");
    for (double b : base_) {
        if (!(b > 0.0)) throw ConfigError("histogram base weights must be positive");
    }
}

RandomHistogramDensity RandomHistogramPosterior::mean() const {
    std::vector<double> probs(base_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = base_[i] + counts_[i];
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return {bin_width_, origin_, std::move(probs)};
}

RandomHistogramDensity RandomHistogramPosterior::sample(Rng& rng) const {
    std::vector<double> logs(base_.size());
    for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = sample_log_gamma(rng, base_[i] + counts_[i]);
    const double mx = *std::max_element(logs.begin(), logs.end());
    std::vector<double> probs(logs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        probs[i] = std::exp(logs[i] - mx);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return {bin_width_, origin_, std::move(probs)};
}

double RandomHistogramPosterior::log_marginal_likelihood() const {
    const double a = std::accumulate(base_.begin(), base_.end(), 0.0);
    double out = -static_cast<double>(n_) * std::log(bin_width_) + std::lgamma(a) -
                 std::lgamma(a + static_cast<double>(n_));
    for (std::size_t i = 0; i < base_.size(); ++i) {
        out += std::lgamma(base_[i] + counts_[i]) - std::lgamma(base_[i]);
    }
    return out;
}

namespace {

HistogramRange default_range(std::span<const double> data, double h) {
    if (data.empty()) throw ConfigError("default histogram range needs data");
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    const double origin = std::floor((*lo - h) / h) * h;
    const double top = std::ceil((*hi + h) / h) * h;
    return {origin, static_cast<std::size_t>(std::llround((top - origin) / h))};
}

}  // namespace

RandomHistogramPosterior random_histogram_posterior(std::span<const double> data, double h,
                                                    std::vector<double> base_weights,
                                                    HistogramRange range) {
    if (!(h > 0.0)) throw ConfigError("histogram bin width must be positive");
    if (base_weights.size() != range.bins) throw ConfigError("one base weight per bin required");
    RandomHistogramDensity probe{h, range.origin, std::vector<double>(range.bins, 0.0)};
    std::vector<double> counts(range.bins, 0.0);
    for (double x : data) {
        const auto bin = probe.bin_of(x);
        if (!bin) throw ConfigError("observation outside the histogram range");
        counts[*bin] += 1.0;
    }
    return {h, range.origin, std::move(base_weights), std::move(counts), data.size()};
}

RandomHistogramPosterior random_histogram_posterior(std::span<const double> data, double h,
                                                    double base_weight_per_bin,
                                                    std::optional<HistogramRange> range) {
    if (!(h > 0.0)) throw ConfigError("histogram bin width must be positive");
    const HistogramRange r = range ? *range : default_range(data, h);
    return random_histogram_posterior(data, h, std::vector<double>(r.bins, base_weight_per_bin), r);
}

RandomHistogramPosterior select_histogram_posterior(std::span<const double> data,
                                                    std::span<const double> candidate_widths,
                                                    double base_density) {
    if (candidate_widths.empty()) throw ConfigError("no candidate bin widths");
    std::optional<RandomHistogramPosterior> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (double h : candidate_widths) {
        auto post = random_histogram_posterior(data, h, base_density * h);
        const double score = post.log_marginal_likelihood();
        if (!best || score > best_score) {
            best = std::move(post);
            best_score = score;
        }
    }
    return *best;
}

}  // namespace hellbayes
