#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace hellbayes {

/// Uniform grid with composite Simpson weights over [a, b].
/// The node count is always odd (an even number of panels).
class QuadratureGrid {
public:
    /// Grid over [a, b] with at least `min_nodes` nodes.
    QuadratureGrid(double a, double b, std::size_t min_nodes);

    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }
    double step() const noexcept { return h_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    double integrate(std::span<const double> values) const;
    double integrate(const std::function<double(double)>& f) const;

    /// Index of the node nearest to x, clamped to the grid.
    std::size_t nearest_index(double x) const noexcept;

private:
    double a_;
    double b_;
    double h_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

struct GridOptions {
    int nodes_per_unit = 32;
    double margin = 10.0;
};

inline constexpr int kMinNodesPerUnit = 8;

/// Grid over [min(data) - margin, max(data) + margin].
GridPtr build_grid(std::span<const double> data, int nodes_per_unit, double margin);
GridPtr build_grid(std::span<const double> data, const GridOptions& options = {});

/// Grid over an explicit range.
GridPtr make_grid(double a, double b, int nodes_per_unit);

}  // namespace hellbayes
