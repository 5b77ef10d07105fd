#include "hellbayes/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hellbayes/error.hpp"
#include "hellbayes/stats.hpp"

namespace hellbayes {

std::string_view to_string(EstimatorMethod m) noexcept {
    switch (m) {
        case EstimatorMethod::Theta1: return "theta1";
        case EstimatorMethod::Theta2: return "theta2";
        case EstimatorMethod::Theta3: return "theta3";
        case EstimatorMethod::ClassicalMhde: return "classical-mhde";
    }
    return "unknown";
}

EstimatorMethod parse_estimator_method(std::string_view tag) {
    if (tag == "t1" || tag == "theta1") return EstimatorMethod::Theta1;
    if (tag == "t2" || tag == "theta2") return EstimatorMethod::Theta2;
    if (tag == "t3" || tag == "theta3") return EstimatorMethod::Theta3;
    if (tag == "mhde" || tag == "classical-mhde") return EstimatorMethod::ClassicalMhde;
    throw ConfigError("unknown estimator method '" + std::string(tag) + "'");
}

double default_epsilon(std::size_t n) {
    if (n < 2) throw ConfigError("default epsilon needs n >= 2");
    const double dn = static_cast<double>(n);
    return std::log(dn) / std::sqrt(dn);
}

SearchBox default_search_box(const ParametricFamily& family, std::span<const double> data) {
    if (data.empty()) throw ConfigError("search box from empty data");
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    double s = sample_sd(data);
    if (!(s > 0.0)) s = 1.0;
    SearchBox box{{*lo - 2.0 * s, *hi + 2.0 * s}};
    if (family.has_scale()) {
        box.push_back({std::max(0.02 * s, 2.0 * family.scale_lower_bound() + 1e-9), 10.0 * s});
    }
    return box;
}

namespace {

std::vector<RootDensity> roots_of(const DensityEnsemble& ensemble, const GridPtr& grid) {
    std::vector<RootDensity> roots;
    roots.reserve(ensemble.size());
    for (const auto& draw : ensemble.draws) roots.push_back(RootDensity::from(draw, grid));
    return roots;
}

double mean_distance(const std::vector<RootDensity>& roots, const ParametricFamily& family,
                     const ParamVector& theta) {
    double sum = 0.0;
    for (const auto& r : roots) sum += r.hellinger_sq(family, theta);
    return sum / static_cast<double>(roots.size());
}

void require_ensemble(const DensityEnsemble& ensemble) {
    if (ensemble.empty()) throw ConfigError("estimator needs a nonempty ensemble");
}

}  // namespace

EstimatorResult theta_hat_1(const DensityEnsemble& ensemble, const ParametricFamily& family,
                            const GridPtr& grid, const SearchBox& box, const EstimatorOptions& options) {
    require_ensemble(ensemble);
    const auto root = RootDensity::from(posterior_mean_density(ensemble, grid));
    const auto r = minimize_hellinger(family, root, box, options.minimize);
    return {r.theta, EstimatorMethod::Theta1, r.value, ensemble.size(), std::nullopt};
}

EstimatorResult theta_hat_2(const DensityEnsemble& ensemble, const ParametricFamily& family,
                            const GridPtr& grid, const SearchBox& box, const EstimatorOptions& options) {
    require_ensemble(ensemble);
    check_box_in_bounds(family, box);
    const auto roots = roots_of(ensemble, grid);
    const auto starts = default_starts(family, RootDensity::from(posterior_mean_density(ensemble, grid)));
    const auto r = minimize_multistart(
        [&](const ParamVector& theta) { return mean_distance(roots, family, theta); }, box, starts,
        options.minimize);
    return {r.theta, EstimatorMethod::Theta2, r.value, ensemble.size(), std::nullopt};
}

EstimatorResult theta_hat_3(const DensityEnsemble& ensemble, const ParametricFamily& family,
                            const GridPtr& grid, const SearchBox& box, double epsilon,
                            const EstimatorOptions& options) {
    require_ensemble(ensemble);
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    check_box_in_bounds(family, box);
    const auto roots = roots_of(ensemble, grid);
    const double inv_j = 1.0 / static_cast<double>(roots.size());

    struct Score {
        double fraction;
        double mean;
    };
    auto score = [&](const ParamVector& theta) {
        int exceed = 0;
        double sum = 0.0;
        for (const auto& r : roots) {
            const double d = r.hellinger_sq(family, theta);
            sum += d;
            if (d > epsilon) ++exceed;
        }
        return Score{exceed * inv_j, sum * inv_j};
    };

    const int points = options.theta3_points > 0 ? options.theta3_points : (box.size() == 1 ? 2001 : 201);
    const auto candidates = box_grid(box, points);
    ParamVector best_theta;
    Score best{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& theta : candidates) {
        const Score s = score(theta);
        const bool wins = s.fraction < best.fraction || (s.fraction == best.fraction && s.mean < best.mean);
        if (wins) {
            best = s;
            best_theta = theta;
        }
    }

    // Polish on the plateau: minimize the mean distance within the adjacent
    // cells while the exceedance fraction stays at its minimum.
    SearchBox cell;
    for (std::size_t c = 0; c < box.size(); ++c) {
        const double step = box[c].width() / static_cast<double>(points - 1);
        cell.push_back({std::max(box[c].lo, best_theta[c] - step), std::min(box[c].hi, best_theta[c] + step)});
    }
    const double min_fraction = best.fraction;
    MinimizeOptions polish = options.minimize;
    polish.verification_points = 0;
    const ParamVector start = best_theta;
    const auto r = minimize_multistart(
        [&](const ParamVector& theta) {
            const Score s = score(theta);
            return s.fraction == min_fraction ? s.mean : std::numeric_limits<double>::infinity();
        },
        cell, std::span<const ParamVector>(&start, 1), polish);
    const ParamVector theta = r.value <= best.mean ? r.theta : best_theta;
    return {theta, EstimatorMethod::Theta3, min_fraction, ensemble.size(), epsilon};
}

EstimatorResult classical_mhde(std::span<const double> data, const ParametricFamily& family,
                               const BandwidthRule& rule, const GridPtr& grid, const SearchBox& box,
                               const EstimatorOptions& options) {
    if (data.size() < 2) throw ConfigError("classical MHDE needs at least two observations");
    const KdeDensity density = kde(data, rule);
    const auto root = RootDensity::from(DensityFn(std::cref(density)), grid);
    const auto r = minimize_hellinger(family, root, box, options.minimize);
    return {r.theta, EstimatorMethod::ClassicalMhde, r.value, 0, std::nullopt};
}

}  // namespace hellbayes
