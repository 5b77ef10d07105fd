#include "hellbayes/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "hellbayes/error.hpp"

namespace hellbayes {

QuadratureGrid::QuadratureGrid(double a, double b, std::size_t min_nodes) : a_(a), b_(b) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
        throw ConfigError("quadrature range must be a finite nonempty interval");
    }
    std::size_t panels = std::max<std::size_t>(min_nodes, 3) - 1;
    if (panels % 2 != 0) ++panels;
    h_ = (b - a) / static_cast<double>(panels);
    nodes_.resize(panels + 1);
    weights_.resize(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) {
        nodes_[i] = a + static_cast<double>(i) * h_;
        weights_[i] = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        weights_[i] *= h_ / 3.0;
    }
    nodes_.back() = b;
}

double QuadratureGrid::integrate(std::span<const double> values) const {
    if (values.size() != nodes_.size()) throw ConfigError("value count does not match grid size");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += weights_[i] * values[i];
    return sum;
}

double QuadratureGrid::integrate(const std::function<double(double)>& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
    return sum;
}

std::size_t QuadratureGrid::nearest_index(double x) const noexcept {
    const double pos = std::round((x - a_) / h_);
    if (!(pos > 0.0)) return 0;
    const auto last = static_cast<double>(nodes_.size() - 1);
    return static_cast<std::size_t>(std::min(pos, last));
}

GridPtr make_grid(double a, double b, int nodes_per_unit) {
    if (nodes_per_unit < kMinNodesPerUnit) {
        throw ConfigError("nodes_per_unit must be at least 8");
    }
    const double width = b - a;
    const auto nodes = static_cast<std::size_t>(std::ceil(width * nodes_per_unit)) + 1;
    return std::make_shared<const QuadratureGrid>(a, b, nodes);
}

GridPtr build_grid(std::span<const double> data, int nodes_per_unit, double margin) {
    if (data.empty()) throw ConfigError("cannot build a grid from empty data");
    if (!(margin > 0.0)) throw ConfigError("grid margin must be positive");
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    return make_grid(*lo - margin, *hi + margin, nodes_per_unit);
}

GridPtr build_grid(std::span<const double> data, const GridOptions& options) {
    return build_grid(data, options.nodes_per_unit, options.margin);
}

}  // namespace hellbayes
