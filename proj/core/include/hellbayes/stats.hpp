#pragma once

#include <numbers>
#include <span>
#include <vector>

namespace hellbayes {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

double normal_pdf(double x, double mean, double variance);
double normal_log_pdf(double x, double mean, double variance);

double mean(std::span<const double> xs);

/// Sample standard deviation (divisor n - 1); 0 for a single value.
double sample_sd(std::span<const double> xs);

/// Empirical quantile with linear interpolation between order statistics
/// (position (n - 1) * p, the "type 7" definition).
double quantile(std::span<const double> xs, double p);

double median(std::span<const double> xs);

/// Median absolute deviation around the median, unscaled.
double mad(std::span<const double> xs);

}  // namespace hellbayes
