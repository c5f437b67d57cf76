#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "condmix/errors.hpp"

namespace condmix {

// Per-replica means with their deterministic interval radii.
struct ReplicaEstimate {
    std::vector<double> means;
    std::vector<double> radii;

    std::size_t replicas() const { return means.size(); }

    // Radius of the mean of the per-replica enclosures.
    double det_radius() const {
        double s = 0.0;
        for (double r : radii) s += r;
        return radii.empty() ? 0.0 : s / static_cast<double>(radii.size());
    }
};

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double betacf(double a, double b, double x) {
    const double eps = 3e-16, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

inline double student_cdf(double t, double dof) {
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * detail::reg_inc_beta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

// Quantile by bisection on the CDF.
inline double student_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("student_quantile: p outside (0,1)");
    if (!(dof > 0.0)) throw DomainError("student_quantile: dof must be positive");
    if (p == 0.5) return 0.0;
    const bool flip = p < 0.5;
    if (flip) p = 1.0 - p;
    double lo = 0.0, hi = 1.0;
    while (student_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);
    return flip ? -q : q;
}

struct StudentCi {
    double mean;
    double halfwidth;
    double stddev;
    double quantile;
    std::size_t dof;
};

// mean +/- t_{(1+level)/2, R-1} * s / sqrt(R)
inline StudentCi student_ci(const ReplicaEstimate& est, double level) {
    const std::size_t r = est.replicas();
    if (r < 2) throw DomainError("student_ci: need at least 2 replicas");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("student_ci: level outside (0,1)");
    double mean = 0.0;
    for (double m : est.means) mean += m;
    mean /= static_cast<double>(r);
    double ss = 0.0;
    for (double m : est.means) ss += (m - mean) * (m - mean);
    const double sd = std::sqrt(ss / static_cast<double>(r - 1));
    const double tq = student_quantile(0.5 * (1.0 + level), static_cast<double>(r - 1));
    return {mean, tq * sd / std::sqrt(static_cast<double>(r)), sd, tq, r - 1};
}

}  // namespace condmix
