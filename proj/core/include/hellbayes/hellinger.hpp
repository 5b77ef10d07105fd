#pragma once

#include <span>
#include <vector>

#include "hellbayes/density.hpp"
#include "hellbayes/family.hpp"
#include "hellbayes/minimize.hpp"
#include "hellbayes/quadrature.hpp"

namespace hellbayes {

/// Largest tolerated error bound 2 * sqrt(leak_f * leak_g) on D_H coming from
/// mass outside the grid range.
inline constexpr double kMaxLeakError = 5e-3;

/// Squared Hellinger distance int (sqrt f - sqrt g)^2 for two normalized densities.
///
/// Computed as 2 - 2 * int sqrt(f g) over the grid, which counts mass that
/// leaks past the grid as non-overlapping, then clamped to [0, 2]. Symmetric
/// in its arguments bit for bit. Throws EvaluatorContractError on a negative
/// or non-finite value and RangeError when both densities leak enough mass
/// that their overlap outside the grid could exceed kMaxLeakError.
double hellinger_sq(const DensityFn& g, const DensityFn& f, const QuadratureGrid& grid);
double hellinger_sq(std::span<const double> g_values, std::span<const double> f_values,
                    const QuadratureGrid& grid);

/// sqrt(g) cached on a grid with quadrature weights folded in, so distances
/// to many family members cost one pass over the grid each.
class RootDensity {
public:
    RootDensity(GridPtr grid, std::span<const double> values);

    static RootDensity from(const GridDensity& g);
    static RootDensity from(const GaussianMixtureDensity& g, const GridPtr& grid);
    static RootDensity from(const DensityFn& g, const GridPtr& grid);

    const QuadratureGrid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    double mass() const noexcept { return mass_; }
    std::span<const double> weighted_root() const noexcept { return weighted_root_; }

    /// int sqrt(g f_theta) over the grid. sqrt(f_theta) is generated by a
    /// multiplicative recurrence outward from the node nearest the mean and
    /// truncated once it drops below 1e-17 of its peak.
    double affinity(const ParametricFamily& family, const ParamVector& theta) const;
    double affinity(double mean, double sigma) const;

    /// clamp(2 - 2 * affinity, 0, 2)
    double hellinger_sq(const ParametricFamily& family, const ParamVector& theta) const;

    std::span<const double> values() const noexcept { return values_; }

    /// Quantile of the grid mass, normalized by the on-grid mass.
    double quantile(double p) const;
    /// Median absolute deviation of the on-grid mass around its median.
    double mad() const;

private:
    GridPtr grid_;
    std::vector<double> weighted_root_;
    std::vector<double> values_;
    double mass_ = 0.0;
};

/// The affinity mu -> int sqrt(g f_{mu,sigma}) for fixed sigma, tabulated at
/// grid nodes on first use and interpolated with 4-point cubic Lagrange.
/// Exact evaluation is used outside the tabulated range. Not thread-safe;
/// keep one profile per chain.
class LocationAffinityProfile {
public:
    LocationAffinityProfile(const RootDensity& root, double sigma);

    double affinity(double mean) const;
    double hellinger_sq(double mean) const;

private:
    const RootDensity* root_;
    double sigma_;
    double x0_;
    double h_;
    /// Filled on first use; NaN marks an entry not yet computed.
    mutable std::vector<double> table_;
};

/// Location starts at the 10/30/50/70/90% quantiles of g; the scale start is
/// 1.4826 * MAD of g.
std::vector<ParamVector> default_starts(const ParametricFamily& family, const RootDensity& g);

/// Throws ConfigError unless the box is valid and strictly inside the family bounds.
void check_box_in_bounds(const ParametricFamily& family, const SearchBox& box);

/// T(g) = argmin_t D_H(g, f_t) over the search box.
MinimizeResult minimize_hellinger(const ParametricFamily& family, const RootDensity& g,
                                  const SearchBox& box, const MinimizeOptions& options = {});
MinimizeResult minimize_hellinger(const ParametricFamily& family, const DensityFn& g,
                                  const GridPtr& grid, const SearchBox& box,
                                  const MinimizeOptions& options = {});

}  // namespace hellbayes
