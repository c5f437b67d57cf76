#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "condmix/errors.hpp"

namespace condmix {

struct LinFit {
    double slope;
    double intercept;
    double r2;
};

inline LinFit linfit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t m = xs.size();
    if (m != ys.size() || m < 2) throw FitError("linfit: need at least 2 paired points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw FitError("linfit: degenerate abscissa");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double r2 = 1.0;
    if (syy > 0.0) {
        double ssres = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double e = ys[i] - (intercept + slope * xs[i]);
            ssres += e * e;
        }
        r2 = 1.0 - ssres / syy;
    }
    return {slope, intercept, r2};
}

struct FitResult {
    double slope;      // per-step decay exponent of log|value|
    double intercept;
    double r2;
    double xi;         // exp(slope)
    std::size_t used;  // points above the floor
};

// Least squares on (n, log|value|) restricted to |value| > floor.
inline FitResult fit_rate(const std::vector<std::pair<double, double>>& series,
                          double floor_level) {
    std::vector<double> xs, ys;
    for (const auto& [n, v] : series) {
        const double a = std::fabs(v);
        if (a > floor_level) {
            xs.push_back(n);
            ys.push_back(std::log(a));
        }
    }
    if (xs.size() < 4) throw FitError("fit_rate: fewer than 4 points above the noise floor");
    const LinFit f = linfit(xs, ys);
    return {f.slope, f.intercept, f.r2, std::exp(f.slope), xs.size()};
}

}  // namespace condmix
