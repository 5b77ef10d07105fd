#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace hellbayes {

/// Parameter vector of a univariate family. At most two coordinates
/// (location, scale); stored inline so it can be copied freely in samplers.
class ParamVector {
public:
    static constexpr std::size_t kMaxDim = 2;

    ParamVector() = default;
    ParamVector(std::initializer_list<double> values);
    explicit ParamVector(std::size_t dim, double fill = 0.0);

    std::size_t size() const noexcept { return dim_; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    const double* begin() const noexcept { return values_.data(); }
    const double* end() const noexcept { return values_.data() + dim_; }

    std::vector<double> to_vector() const { return {begin(), end()}; }

    friend bool operator==(const ParamVector& a, const ParamVector& b) noexcept;

private:
    std::array<double, kMaxDim> values_{};
    std::size_t dim_ = 0;
};

enum class FamilyId { NormalLocation, NormalLocationScale };

std::string_view to_string(FamilyId id) noexcept;

/// Accepts "normal-loc", "normal-location", "normal-loc-scale", "normal-location-scale".
FamilyId parse_family_id(std::string_view name);

struct Interval {
    double lo;
    double hi;

    bool contains_open(double x) const noexcept { return x > lo && x < hi; }
    double width() const noexcept { return hi - lo; }
};

struct ParamViolation {
    std::size_t coordinate;
    double value;
    std::string message;
};

/// Gaussian data-generation families.
///   NormalLocation:      theta = (mu),        sigma fixed at known_sigma
///   NormalLocationScale: theta = (mu, sigma), sigma > scale_lower_bound
/// Immutable after construction.
class ParametricFamily {
public:
    static ParametricFamily normal_location(double known_sigma = 1.0);
    static ParametricFamily normal_location_scale(double scale_lower_bound = 1e-8);

    FamilyId id() const noexcept { return id_; }
    std::size_t dimension() const noexcept { return id_ == FamilyId::NormalLocation ? 1 : 2; }
    double known_sigma() const noexcept { return known_sigma_; }
    double scale_lower_bound() const noexcept { return scale_lower_bound_; }
    bool has_scale() const noexcept { return id_ == FamilyId::NormalLocationScale; }

    /// Open interval of admissible values per coordinate.
    Interval bounds(std::size_t coordinate) const;

    std::vector<ParamViolation> validate(const ParamVector& theta) const;
    bool in_bounds(const ParamVector& theta) const noexcept;
    /// Throws ParameterDomainError listing every violation.
    void require_in_bounds(const ParamVector& theta) const;

    double location(const ParamVector& theta) const noexcept { return theta[0]; }
    double scale(const ParamVector& theta) const noexcept {
        return id_ == FamilyId::NormalLocation ? known_sigma_ : theta[1];
    }

    double log_density(const ParamVector& theta, double x) const;
    double density(const ParamVector& theta, double x) const;

    /// Expected information per observation, row-major p x p.
    std::vector<double> fisher_information(const ParamVector& theta) const;

private:
    ParametricFamily(FamilyId id, double known_sigma, double scale_lower_bound)
        : id_(id), known_sigma_(known_sigma), scale_lower_bound_(scale_lower_bound) {}

    FamilyId id_;
    double known_sigma_;
    double scale_lower_bound_;
};

// Free-function forms of the family operations.
double log_density(const ParametricFamily& family, const ParamVector& theta, double x);
std::vector<double> fisher_information(const ParametricFamily& family, const ParamVector& theta);
std::vector<ParamViolation> validate_params(const ParametricFamily& family, const ParamVector& theta);

}  // namespace hellbayes
