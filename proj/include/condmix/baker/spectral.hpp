#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "condmix/baker/map.hpp"
#include "condmix/baker/sampling.hpp"
#include "condmix/errors.hpp"
#include "condmix/observable.hpp"
#include "condmix/stats/fit.hpp"
#include "condmix/stats/rng.hpp"
#include "condmix/stats/student.hpp"

namespace condmix {

struct CorrelationPoint {
    int n;
    double estimate;
    double ci_halfwidth;
};

struct CorrelationSeries {
    std::vector<CorrelationPoint> points;
    std::size_t samples = 0;
    std::size_t replicas = 0;
};

// Replica estimates of rho_t(A o b^n . B) - rho_t(B) rho(A), the conditional
// correlation against the leaf measure, with a Student-t interval per lag.
// Each replica draws its own leaf and product samples from stream
// (seed, "baker-mix", r) and reuses them across all lags.
inline CorrelationSeries mixing_correlation(const BakerMap& map, const Foliation& fol, double t,
                                            const Observable& A, const Observable& B, int n_max,
                                            std::size_t m_samples, std::size_t replicas,
                                            std::uint64_t seed, double level = 0.99,
                                            int depth = -1) {
    if (n_max < 0) throw DomainError("mixing_correlation: n_max must be nonnegative");
    if (m_samples == 0) throw DomainError("mixing_correlation: need samples");
    if (replicas < 2) throw DomainError("mixing_correlation: need at least 2 replicas");
    const int d = depth < 0 ? nu0_depth(map.mu_bound) : depth;

    std::vector<std::vector<double>> q(static_cast<std::size_t>(n_max) + 1,
                                       std::vector<double>(replicas, 0.0));
    for (std::size_t r = 0; r < replicas; ++r) {
        auto g = rng_stream(seed, "baker-mix", r);
        auto pts = conditional_sample(map, fol, t, m_samples, g, d);

        std::vector<double> bs(m_samples);
        double mean_b = 0.0;
        for (std::size_t m = 0; m < m_samples; ++m) {
            bs[m] = B(pts[m].first, pts[m].second);
            mean_b += bs[m];
        }
        mean_b /= static_cast<double>(m_samples);

        double mean_a_srb = 0.0;
        for (std::size_t m = 0; m < m_samples; ++m) {
            const double x = g.next_unit();
            mean_a_srb += A(x, nu0_draw(map, g, d));
        }
        mean_a_srb /= static_cast<double>(m_samples);

        for (int n = 0; n <= n_max; ++n) {
            double mean_ab = 0.0;
            for (std::size_t m = 0; m < m_samples; ++m)
                mean_ab += A(pts[m].first, pts[m].second) * bs[m];
            mean_ab /= static_cast<double>(m_samples);
            q[static_cast<std::size_t>(n)][r] = mean_ab - mean_b * mean_a_srb;
            if (n < n_max)
                for (auto& p : pts) p = baker_step(p.first, p.second, map);
        }
    }

    CorrelationSeries out;
    out.samples = m_samples;
    out.replicas = replicas;
    out.points.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        ReplicaEstimate est{q[static_cast<std::size_t>(n)],
                            std::vector<double>(replicas, 0.0)};
        const StudentCi ci = student_ci(est, level);
        out.points.push_back({n, ci.mean, ci.halfwidth});
    }
    return out;
}

// |nu0_hat(j)| = |M^-1 sum exp(2 pi i j psi(y_m))| for j = 0..j_max.
inline std::vector<double> fourier_magnitudes(const BakerMap& map, const Foliation& fol, int j_max,
                                              std::size_t m_samples, RngStream& rng,
                                              int depth = -1) {
    if (j_max < 1) throw DomainError("fourier_magnitudes: j_max must be positive");
    if (m_samples == 0) throw DomainError("fourier_magnitudes: need samples");
    const int d = depth < 0 ? nu0_depth(map.mu_bound) : depth;
    std::vector<double> cs(static_cast<std::size_t>(j_max) + 1, 0.0);
    std::vector<double> sn(static_cast<std::size_t>(j_max) + 1, 0.0);
    for (std::size_t m = 0; m < m_samples; ++m) {
        const double ph = 2.0 * std::numbers::pi * fol.psi(nu0_draw(map, rng, d));
        for (int j = 0; j <= j_max; ++j) {
            cs[static_cast<std::size_t>(j)] += std::cos(j * ph);
            sn[static_cast<std::size_t>(j)] += std::sin(j * ph);
        }
    }
    std::vector<double> mags(static_cast<std::size_t>(j_max) + 1);
    for (int j = 0; j <= j_max; ++j) {
        const auto u = static_cast<std::size_t>(j);
        mags[u] = std::hypot(cs[u], sn[u]) / static_cast<double>(m_samples);
    }
    return mags;
}

struct FourierResult {
    std::vector<double> magnitudes;  // j = 0..j_max
    double eta = 0.0;
    double r2 = 0.0;
    std::size_t used = 0;  // coefficients above the noise floor
};

// Power-law fit |nu0_hat(j)| ~ j^-eta over precomputed coefficients above the
// Monte Carlo noise floor 3 M^-1/2.
inline FourierResult fourier_fit(std::vector<double> magnitudes, std::size_t m_samples) {
    if (magnitudes.size() < 9) throw DomainError("fourier_fit: j_max must be at least 8");
    FourierResult out;
    out.magnitudes = std::move(magnitudes);
    const double floor_level = 3.0 / std::sqrt(static_cast<double>(m_samples));
    std::vector<double> lx, ly;
    for (std::size_t j = 1; j < out.magnitudes.size(); ++j) {
        const double a = out.magnitudes[j];
        if (a > floor_level) {
            lx.push_back(std::log(static_cast<double>(j)));
            ly.push_back(std::log(a));
        }
    }
    if (lx.size() < 4)
        throw FitError("fourier_fit: too few coefficients above the noise floor");
    const LinFit fit = linfit(lx, ly);
    out.eta = -fit.slope;
    out.r2 = fit.r2;
    out.used = lx.size();
    return out;
}

inline FourierResult fourier_decay(const BakerMap& map, const Foliation& fol, int j_max,
                                   std::size_t m_samples, RngStream& rng, int depth = -1) {
    if (j_max < 8) throw DomainError("fourier_decay: j_max must be at least 8");
    if (m_samples < static_cast<std::size_t>(j_max) * static_cast<std::size_t>(j_max))
        throw DomainError("fourier_decay: need sample count well above j_max^2");
    return fourier_fit(fourier_magnitudes(map, fol, j_max, m_samples, rng, depth), m_samples);
}

// Closed-form decay rate k^(-eta / (beta + (1+eta) log k / log(1/mu))).
inline double predicted_xi(int k, double mu, double eta, double beta) {
    if (k < 2) throw DomainError("predicted_xi: k must be at least 2");
    if (!(mu > 0.0 && mu < 1.0)) throw DomainError("predicted_xi: mu outside (0,1)");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("predicted_xi: eta outside (0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("predicted_xi: beta outside (0,1]");
    const double lk = std::log(static_cast<double>(k));
    const double denom = beta + (1.0 + eta) * lk / std::log(1.0 / mu);
    return std::pow(static_cast<double>(k), -eta / denom);
}

}  // namespace condmix
