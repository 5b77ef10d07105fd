#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hellbayes/family.hpp"

namespace hellbayes {

/// Per-coordinate closed search interval.
using SearchBox = std::vector<Interval>;

using Objective = std::function<double(const ParamVector&)>;

struct MinimizeOptions {
    double tolerance = 1e-6;
    int verification_points = 200;
    int max_sweeps = 100;
};

struct MinimizeResult {
    ParamVector theta;
    double value = 0.0;
    long evaluations = 0;
};

/// Throws ConfigError when any interval is empty or reversed.
void check_search_box(const SearchBox& box);

/// Multi-start coordinate-wise golden-section search inside `box`.
///
/// Each start runs coordinate sweeps (bracket expansion then golden section
/// to `tolerance`) until no coordinate moves by more than `tolerance`. The
/// result is then checked against a tensor verification grid with
/// `verification_points` per coordinate; a grid point that beats it seeds one
/// more local search. Ties go to the smaller value, then the
/// lexicographically smaller theta.
MinimizeResult minimize_multistart(const Objective& objective, const SearchBox& box,
                                   std::span<const ParamVector> starts,
                                   const MinimizeOptions& options = {});

/// Golden-section minimum of a 1D function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance);

/// Evenly spaced points over the box, `points` per coordinate, row-major.
std::vector<ParamVector> box_grid(const SearchBox& box, int points);

}  // namespace hellbayes
