#include "hellbayes/hellinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hellbayes/error.hpp"

namespace hellbayes {
namespace {

constexpr double kRootCutoff = 1e-17;
constexpr int kRefreshBlock = 64;

void check_density_values(std::span<const double> values, const char* which) {
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw EvaluatorContractError(std::string("density evaluator '") + which +
                                         "' returned a negative or non-finite value");
        }
    }
}

std::vector<double> evaluate_on(const DensityFn& fn, const QuadratureGrid& grid) {
    std::vector<double> out(grid.size());
    const auto nodes = grid.nodes();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(nodes[i]);
    return out;
}

}  // namespace

double hellinger_sq(std::span<const double> g_values, std::span<const double> f_values,
                    const QuadratureGrid& grid) {
    if (g_values.size() != grid.size() || f_values.size() != grid.size()) {
        throw ConfigError("density values do not match grid size");
    }
    check_density_values(g_values, "g");
    check_density_values(f_values, "f");
    const auto w = grid.weights();
    double mass_g = 0.0;
    double mass_f = 0.0;
    double affinity = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        mass_g += w[i] * g_values[i];
        mass_f += w[i] * f_values[i];
        affinity += w[i] * (std::sqrt(g_values[i]) * std::sqrt(f_values[i]));
    }
    // Outside the grid, int sqrt(fg) <= sqrt(leak_f * leak_g) by Cauchy-Schwarz.
    const double leak_g = std::max(0.0, 1.0 - mass_g);
    const double leak_f = std::max(0.0, 1.0 - mass_f);
    if (2.0 * std::sqrt(leak_f * leak_g) > kMaxLeakError) {
        throw RangeError("both densities leak mass outside the quadrature range; rebuild the grid");
    }
    return std::clamp(2.0 - 2.0 * affinity, 0.0, 2.0);
}

double hellinger_sq(const DensityFn& g, const DensityFn& f, const QuadratureGrid& grid) {
    const auto gv = evaluate_on(g, grid);
    const auto fv = evaluate_on(f, grid);
    return hellinger_sq(gv, fv, grid);
}

RootDensity::RootDensity(GridPtr grid, std::span<const double> values)
    : grid_(std::move(grid)), values_(values.begin(), values.end()) {
    if (!grid_) throw ConfigError("null grid");
    if (values_.size() != grid_->size()) throw ConfigError("density values do not match grid size");
    check_density_values(values_, "g");
    const auto w = grid_->weights();
    weighted_root_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        weighted_root_[i] = w[i] * std::sqrt(values_[i]);
        mass_ += w[i] * values_[i];
    }
}

RootDensity RootDensity::from(const GridDensity& g) { return {g.grid_ptr(), g.values()}; }

RootDensity RootDensity::from(const GaussianMixtureDensity& g, const GridPtr& grid) {
    return {grid, g.evaluate(*grid)};
}

RootDensity RootDensity::from(const DensityFn& g, const GridPtr& grid) {
    return {grid, evaluate_on(g, *grid)};
}

double RootDensity::affinity(double mean, double sigma) const {
    const auto x = grid_->nodes();
    const auto& wr = weighted_root_;
    const std::size_t n = wr.size();
    const double h = grid_->step();
    const double a = 1.0 / (4.0 * sigma * sigma);
    const double q = std::exp(-2.0 * a * h * h);
    const std::size_t i0 = grid_->nearest_index(mean);

    // sqrt f(x) = c exp(-a (x - mean)^2); consecutive ratios form a geometric
    // sequence with factor q. Exact values are refreshed every block.
    double sum = 0.0;
    for (std::size_t start = i0; start < n;) {
        const double t = x[start] - mean;
        double e = std::exp(-a * t * t);
        double r = std::exp(-a * (2.0 * t * h + h * h));
        const std::size_t stop = std::min(n, start + kRefreshBlock);
        for (std::size_t i = start; i < stop; ++i) {
            sum += wr[i] * e;
            e *= r;
            r *= q;
        }
        start = stop;
        if (e < kRootCutoff) break;
    }
    for (std::size_t end = i0; end > 0;) {
        const double t = x[end] - mean;
        double e = std::exp(-a * t * t);
        double s = std::exp(-a * (h * h - 2.0 * t * h));
        const std::size_t stop = end > kRefreshBlock ? end - kRefreshBlock : 0;
        for (std::size_t i = end; i > stop; --i) {
            e *= s;
            s *= q;
            sum += wr[i - 1] * e;
        }
        end = stop;
        if (e < kRootCutoff) break;
    }
    const double c = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    return c * sum;
}

double RootDensity::affinity(const ParametricFamily& family, const ParamVector& theta) const {
    return affinity(family.location(theta), family.scale(theta));
}

double RootDensity::hellinger_sq(const ParametricFamily& family, const ParamVector& theta) const {
    return std::clamp(2.0 - 2.0 * affinity(family, theta), 0.0, 2.0);
}

double RootDensity::quantile(double p) const {
    const auto x = grid_->nodes();
    const double h = grid_->step();
    std::vector<double> cum(values_.size(), 0.0);
    for (std::size_t i = 1; i < values_.size(); ++i) {
        cum[i] = cum[i - 1] + 0.5 * h * (values_[i - 1] + values_[i]);
    }
    const double total = cum.back();
    if (!(total > 0.0)) throw NumericError("density has no mass on the grid");
    const double target = std::clamp(p, 0.0, 1.0) * total;
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    if (it == cum.begin()) return x.front();
    if (it == cum.end()) return x.back();
    const auto i = static_cast<std::size_t>(it - cum.begin());
    const double span = cum[i] - cum[i - 1];
    const double frac = span > 0.0 ? (target - cum[i - 1]) / span : 0.0;
    return x[i - 1] + frac * h;
}

LocationAffinityProfile::LocationAffinityProfile(const RootDensity& root, double sigma)
    : root_(&root),
      sigma_(sigma),
      x0_(root.grid().lower()),
      h_(root.grid().step()),
      table_(root.grid().size(), std::numeric_limits<double>::quiet_NaN()) {
    if (!(sigma > 0.0)) throw ConfigError("profile sigma must be positive");
}

double LocationAffinityProfile::affinity(double mean) const {
    const double pos = (mean - x0_) / h_;
    const double j_floor = std::floor(pos);
    if (!(j_floor >= 1.0) || j_floor + 2.0 > static_cast<double>(table_.size() - 1)) {
        return root_->affinity(mean, sigma_);
    }
    const auto j = static_cast<std::size_t>(j_floor);
    auto node = [&](std::size_t k) {
        double& v = table_[k];
        if (std::isnan(v)) v = root_->affinity(x0_ + static_cast<double>(k) * h_, sigma_);
        return v;
    };
    const double u = pos - j_floor;
    const double lm1 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double l0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double l1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double l2 = (u + 1.0) * u * (u - 1.0) / 6.0;
    return lm1 * node(j - 1) + l0 * node(j) + l1 * node(j + 1) + l2 * node(j + 2);
}

double LocationAffinityProfile::hellinger_sq(double mean) const {
    return std::clamp(2.0 - 2.0 * affinity(mean), 0.0, 2.0);
}

double RootDensity::mad() const {
    const double m = quantile(0.5);
    const auto x = grid_->nodes();
    const auto w = grid_->weights();
    auto mass_within = [&](double d) {
        double inside = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::abs(x[i] - m) <= d) inside += w[i] * values_[i];
        }
        return inside;
    };
    double lo = 0.0;
    double hi = grid_->upper() - grid_->lower();
    for (int it = 0; it < 60; ++it) {
        const double d = 0.5 * (lo + hi);
        if (mass_within(d) < 0.5 * mass_) lo = d; else hi = d;
    }
    return 0.5 * (lo + hi);
}

std::vector<ParamVector> default_starts(const ParametricFamily& family, const RootDensity& g) {
    constexpr double kLevels[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    const double scale_start =
        family.has_scale() ? std::max(1.4826 * g.mad(), 2.0 * family.scale_lower_bound() + 1e-6) : 0.0;
    std::vector<ParamVector> starts;
    for (double level : kLevels) {
        if (family.has_scale()) {
            starts.push_back(ParamVector{g.quantile(level), scale_start});
        } else {
            starts.push_back(ParamVector{g.quantile(level)});
        }
    }
    return starts;
}

void check_box_in_bounds(const ParametricFamily& family, const SearchBox& box) {
    check_search_box(box);
    if (box.size() != family.dimension()) throw ConfigError("search box dimension mismatch");
    for (std::size_t c = 0; c < box.size(); ++c) {
        const Interval b = family.bounds(c);
        if (box[c].lo <= b.lo || box[c].hi >= b.hi) {
            throw ConfigError("search box must lie inside the family parameter bounds");
        }
    }
}

MinimizeResult minimize_hellinger(const ParametricFamily& family, const RootDensity& g,
                                  const SearchBox& box, const MinimizeOptions& options) {
    check_box_in_bounds(family, box);
    const auto starts = default_starts(family, g);
    return minimize_multistart(
        [&](const ParamVector& theta) { return g.hellinger_sq(family, theta); }, box, starts,
        options);
}

MinimizeResult minimize_hellinger(const ParametricFamily& family, const DensityFn& g,
                                  const GridPtr& grid, const SearchBox& box,
                                  const MinimizeOptions& options) {
    return minimize_hellinger(family, RootDensity::from(g, grid), box, options);
}

}  // namespace hellbayes
