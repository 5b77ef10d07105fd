#pragma once

// Independent reference computations used as test oracles.

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

/// Closed-form squared Hellinger distance between two normals.
inline double hellinger_normals(double m1, double s1, double m2, double s2) {
    const double v = s1 * s1 + s2 * s2;
    return 2.0 * (1.0 - std::sqrt(2.0 * s1 * s2 / v) * std::exp(-(m1 - m2) * (m1 - m2) / (4.0 * v)));
}

/// Brute-force argmin of f over [lo, hi] with a fixed step.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, double step) {
    double best_x = lo;
    double best = std::numeric_limits<double>::infinity();
    for (double x = lo; x <= hi + 1e-12; x += step) {
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

/// Trapezoid rule with many panels.
inline double trapezoid(const std::function<double(double)>& f, double lo, double hi, int panels = 200000) {
    const double h = (hi - lo) / panels;
    double s = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < panels; ++i) s += f(lo + i * h);
    return s * h;
}

inline double normal_pdf(double x, double m, double s) {
    const double z = (x - m) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
}

}  // namespace oracle
