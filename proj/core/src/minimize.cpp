#include "hellbayes/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hellbayes/error.hpp"

namespace hellbayes {
namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

struct Point {
    double x;
    double f;
};

Point golden(const std::function<double(double)>& f, double lo, double hi, double tolerance) {
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > tolerance) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - kInvPhi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = f(d);
        }
    }
    return fc <= fd ? Point{c, fc} : Point{d, fd};
}

/// Expands a bracket downhill from x0, then golden-sections inside it.
Point line_minimize(const std::function<double(double)>& f, Point start, double lo, double hi,
                    double step, double tolerance) {
    auto expand = [&](double dir) -> std::pair<double, double> {
        const double limit = dir > 0 ? hi : lo;
        double prev = start.x;
        double cur = std::clamp(start.x + dir * step, lo, hi);
        if (cur == start.x) return {start.x, start.x};
        double fcur = f(cur);
        if (!(fcur < start.f)) return {start.x, start.x};
        double width = step;
        while (cur != limit) {
            width *= 2.0;
            const double next = std::clamp(cur + dir * width, lo, hi);
            const double fnext = f(next);
            if (!(fnext < fcur)) return std::minmax(prev, next);
            prev = cur;
            cur = next;
            fcur = fnext;
        }
        return std::minmax(prev, cur);
    };
    auto [a, b] = expand(+1.0);
    if (a == b) std::tie(a, b) = expand(-1.0);
    if (a == b) {
        a = std::max(lo, start.x - step);
        b = std::min(hi, start.x + step);
    }
    if (b - a <= tolerance) return start;
    const Point best = golden(f, a, b, tolerance);
    return best.f < start.f ? best : start;
}

bool better(const MinimizeResult& a, const MinimizeResult& b) {
    if (a.value != b.value) return a.value < b.value;
    return std::lexicographical_compare(a.theta.begin(), a.theta.end(), b.theta.begin(), b.theta.end());
}

class LocalSearch {
public:
    LocalSearch(const Objective& objective, const SearchBox& box, const MinimizeOptions& options)
        : objective_(objective), box_(box), options_(options) {}

    double eval(const ParamVector& x) {
        ++evaluations_;
        return objective_(x);
    }

    MinimizeResult run(ParamVector x) {
        for (std::size_t c = 0; c < box_.size(); ++c) x[c] = std::clamp(x[c], box_[c].lo, box_[c].hi);
        double fx = eval(x);
        std::vector<double> steps(box_.size());
        for (std::size_t c = 0; c < box_.size(); ++c) steps[c] = box_[c].width() / 20.0;

        for (int sweep = 0; sweep < options_.max_sweeps; ++sweep) {
            double max_move = 0.0;
            for (std::size_t c = 0; c < box_.size(); ++c) {
                auto along = [&](double v) {
                    ParamVector y = x;
                    y[c] = v;
                    return eval(y);
                };
                const double old = x[c];
                const Point p = line_minimize(along, {x[c], fx}, box_[c].lo, box_[c].hi, steps[c],
                                              options_.tolerance);
                x[c] = p.x;
                fx = p.f;
                const double move = std::abs(p.x - old);
                max_move = std::max(max_move, move);
                steps[c] = std::clamp(2.0 * move, 10.0 * options_.tolerance, box_[c].width() / 4.0);
            }
            if (max_move <= options_.tolerance) break;
        }
        return {x, fx, 0};
    }

    long evaluations() const noexcept { return evaluations_; }

private:
    const Objective& objective_;
    const SearchBox& box_;
    const MinimizeOptions& options_;
    long evaluations_ = 0;
};

}  // namespace

void check_search_box(const SearchBox& box) {
    if (box.empty() || box.size() > ParamVector::kMaxDim) {
        throw ConfigError("search box must have 1 or 2 coordinates");
    }
    for (const auto& iv : box) {
        if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
            throw ConfigError("search box interval is empty or unbounded");
        }
    }
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance) {
    if (!(hi > lo)) throw ConfigError("golden section needs lo < hi");
    return golden(f, lo, hi, tolerance).x;
}

std::vector<ParamVector> box_grid(const SearchBox& box, int points) {
    check_search_box(box);
    if (points < 2) throw ConfigError("box grid needs at least 2 points per coordinate");
    auto coord = [&](std::size_t c, int i) {
        return box[c].lo + box[c].width() * static_cast<double>(i) / static_cast<double>(points - 1);
    };
    std::vector<ParamVector> out;
    if (box.size() == 1) {
        out.reserve(points);
        for (int i = 0; i < points; ++i) out.push_back(ParamVector{coord(0, i)});
    } else {
        out.reserve(static_cast<std::size_t>(points) * points);
        for (int i = 0; i < points; ++i) {
            for (int j = 0; j < points; ++j) out.push_back(ParamVector{coord(0, i), coord(1, j)});
        }
    }
    return out;
}

MinimizeResult minimize_multistart(const Objective& objective, const SearchBox& box,
                                   std::span<const ParamVector> starts,
                                   const MinimizeOptions& options) {
    check_search_box(box);
    if (starts.empty()) throw ConfigError("minimizer needs at least one start");
    LocalSearch search(objective, box, options);

    MinimizeResult best;
    bool have = false;
    for (const auto& s : starts) {
        if (s.size() != box.size()) throw ConfigError("start dimension does not match search box");
        const MinimizeResult r = search.run(s);
        if (!have || better(r, best)) {
            best = r;
            have = true;
        }
    }

    if (options.verification_points >= 2) {
        MinimizeResult grid_best;
        bool any = false;
        for (const auto& p : box_grid(box, options.verification_points)) {
            const MinimizeResult r{p, search.eval(p), 0};
            if (!any || better(r, grid_best)) {
                grid_best = r;
                any = true;
            }
        }
        if (grid_best.value < best.value) {
            const MinimizeResult polished = search.run(grid_best.theta);
            best = better(polished, grid_best) ? polished : grid_best;
        }
    }
    best.evaluations = search.evaluations();
    return best;
}

}  // namespace hellbayes
