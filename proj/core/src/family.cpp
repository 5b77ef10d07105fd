#include "hellbayes/family.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hellbayes/error.hpp"
#include "hellbayes/stats.hpp"

namespace hellbayes {

ParamVector::ParamVector(std::initializer_list<double> values) {
    if (values.size() == 0 || values.size() > kMaxDim) {
        throw ConfigError("parameter vector must have 1 or 2 coordinates");
    }
    dim_ = values.size();
    std::size_t i = 0;
    for (double v : values) values_[i++] = v;
}

ParamVector::ParamVector(std::size_t dim, double fill) : dim_(dim) {
    if (dim == 0 || dim > kMaxDim) throw ConfigError("parameter vector must have 1 or 2 coordinates");
    values_.fill(fill);
}

bool operator==(const ParamVector& a, const ParamVector& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i) {
        if (a.values_[i] != b.values_[i]) return false;
    }
    return true;
}

std::string_view to_string(FamilyId id) noexcept {
    switch (id) {
        case FamilyId::NormalLocation: return "normal-loc";
        case FamilyId::NormalLocationScale: return "normal-loc-scale";
    }
    return "unknown";
}

FamilyId parse_family_id(std::string_view name) {
    if (name == "normal-loc" || name == "normal-location") return FamilyId::NormalLocation;
    if (name == "normal-loc-scale" || name == "normal-location-scale") return FamilyId::NormalLocationScale;
    throw ConfigError("unknown family '" + std::string(name) + "'");
}

ParametricFamily ParametricFamily::normal_location(double known_sigma) {
    if (!(known_sigma > 0.0) || !std::isfinite(known_sigma)) {
        throw ConfigError("known sigma must be positive");
    }
    return {FamilyId::NormalLocation, known_sigma, 0.0};
}

ParametricFamily ParametricFamily::normal_location_scale(double scale_lower_bound) {
    if (!(scale_lower_bound >= 0.0)) throw ConfigError("scale lower bound must be nonnegative");
    return {FamilyId::NormalLocationScale, 1.0, scale_lower_bound};
}

Interval ParametricFamily::bounds(std::size_t coordinate) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (coordinate == 0) return {-inf, inf};
    if (coordinate == 1 && has_scale()) return {scale_lower_bound_, inf};
    throw ConfigError("coordinate out of range for family");
}

std::vector<ParamViolation> ParametricFamily::validate(const ParamVector& theta) const {
    std::vector<ParamViolation> out;
    if (theta.size() != dimension()) {
        std::ostringstream msg;
        msg << "expected " << dimension() << " coordinates, got " << theta.size();
        out.push_back({theta.size(), 0.0, msg.str()});
        return out;
    }
    for (std::size_t c = 0; c < dimension(); ++c) {
        const Interval b = bounds(c);
        const double v = theta[c];
        if (std::isnan(v) || !b.contains_open(v)) {
            std::ostringstream msg;
            if (c == 1) {
                msg << "scale " << v << " must exceed " << b.lo;
            } else {
                msg << "location " << v << " must be finite";
            }
            out.push_back({c, v, msg.str()});
        }
    }
    return out;
}

bool ParametricFamily::in_bounds(const ParamVector& theta) const noexcept {
    if (theta.size() != dimension()) return false;
    if (!std::isfinite(theta[0])) return false;
    if (has_scale() && !(theta[1] > scale_lower_bound_ && std::isfinite(theta[1]))) return false;
    return true;
}

void ParametricFamily::require_in_bounds(const ParamVector& theta) const {
    const auto violations = validate(theta);
    if (violations.empty()) return;
    std::string msg = "parameter out of bounds:";
    for (const auto& v : violations) msg += " " + v.message + ";";
    throw ParameterDomainError(msg);
}

double ParametricFamily::log_density(const ParamVector& theta, double x) const {
    require_in_bounds(theta);
    const double s = scale(theta);
    return normal_log_pdf(x, theta[0], s * s);
}

double ParametricFamily::density(const ParamVector& theta, double x) const {
    return std::exp(log_density(theta, x));
}

std::vector<double> ParametricFamily::fisher_information(const ParamVector& theta) const {
    require_in_bounds(theta);
    const double s = scale(theta);
    const double inv_var = 1.0 / (s * s);
    if (!has_scale()) return {inv_var};
    return {inv_var, 0.0, 0.0, 2.0 * inv_var};
}

double log_density(const ParametricFamily& family, const ParamVector& theta, double x) {
    return family.log_density(theta, x);
}

std::vector<double> fisher_information(const ParametricFamily& family, const ParamVector& theta) {
    return family.fisher_information(theta);
}

std::vector<ParamViolation> validate_params(const ParametricFamily& family, const ParamVector& theta) {
    return family.validate(theta);
}

}  // namespace hellbayes
