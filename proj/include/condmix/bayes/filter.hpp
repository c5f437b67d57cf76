#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "condmix/errors.hpp"
#include "condmix/lozi/map.hpp"
#include "condmix/observable.hpp"
#include "condmix/stats/rng.hpp"

namespace condmix {

// Weighted particle representation of a measure on phase space.
struct Ensemble {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;  // normalized to unit total
};

// Single noisy partial observation y = H(state) + N(0, sigma^2).
struct Observation {
    Observable h;
    double y = 0.0;
    double sigma = 0.0;
    double tol = 1e-3;  // selection band standing in for the delta kernel at sigma = 0
};

// Equal-weight particles from a burnt-in orbit.  The stride thins the orbit so
// particles are nearly independent and the weighted standard error is honest.
inline Ensemble prior_from_srb(const LoziParams& params, std::size_t count, std::uint64_t seed,
                               std::uint64_t burn_in = 1000, std::uint64_t stride = 16) {
    if (!params.flags.chaotic) throw DomainError("prior_from_srb: parameters not chaotic");
    if (count == 0) throw DomainError("prior_from_srb: need at least one particle");
    if (stride == 0) throw DomainError("prior_from_srb: stride must be positive");
    auto g = rng_stream(seed, "bayes-prior", 0);
    double x = 0.2 + 0.1 * g.next_unit();
    double y = 0.1 * g.next_unit();
    Ensemble e;
    e.x.reserve(count);
    e.y.reserve(count);
    for (std::uint64_t i = 0; e.x.size() < count; ++i) {
        const double nx = 1.0 + y - params.a * std::fabs(x);
        y = params.b * x;
        x = nx;
        if (std::fabs(x) > 1.5 || std::fabs(y) > 1.5)
            throw EscapeError("prior_from_srb: orbit left the attractor region");
        if (i >= burn_in && (i - burn_in) % stride == 0) {
            e.x.push_back(x);
            e.y.push_back(y);
        }
    }
    e.w.assign(count, 1.0 / static_cast<double>(count));
    return e;
}

// Importance reweighting by the observation likelihood.  The log-sum-exp
// normalization absorbs any constant likelihood factor, so the update is
// invariant under rescaling and safe when every density underflows.
inline Ensemble bayes_update(const Ensemble& e, const Observation& obs) {
    const std::size_t m = e.x.size();
    if (m == 0 || e.y.size() != m || e.w.size() != m)
        throw DomainError("bayes_update: malformed ensemble");
    if (!obs.h) throw DomainError("bayes_update: missing observable");
    if (obs.sigma < 0.0) throw DomainError("bayes_update: negative noise level");
    Ensemble out = e;
    if (std::isinf(obs.sigma)) {  // flat likelihood: posterior = prior
        return out;
    }
    if (obs.sigma == 0.0) {
        if (obs.tol <= 0.0) throw DomainError("bayes_update: zero-noise mode needs positive tol");
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const bool in = std::fabs(obs.y - obs.h(e.x[i], e.y[i])) < obs.tol;
            out.w[i] = in ? e.w[i] : 0.0;
            total += out.w[i];
        }
        if (total <= 0.0)
            throw DegeneratePosteriorError("bayes_update: no particles inside the tol band");
        for (auto& w : out.w) w /= total;
        return out;
    }
    const double inv2s2 = 1.0 / (2.0 * obs.sigma * obs.sigma);
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(m, ninf);
    double top = ninf;
    for (std::size_t i = 0; i < m; ++i) {
        if (e.w[i] <= 0.0) continue;
        const double d = obs.y - obs.h(e.x[i], e.y[i]);
        logw[i] = std::log(e.w[i]) - d * d * inv2s2;
        top = std::max(top, logw[i]);
    }
    if (top == ninf)
        throw DegeneratePosteriorError("bayes_update: all prior weights vanish");
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        out.w[i] = logw[i] == ninf ? 0.0 : std::exp(logw[i] - top);
        total += out.w[i];
    }
    for (auto& w : out.w) w /= total;
    return out;
}

struct Forecast {
    double estimate;
    double se;
};

namespace detail {

// Weighted mean and standard error of a over a particle array.
inline Forecast weighted_stats(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>& ws, const Observable& a) {
    std::vector<double> vals(xs.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        vals[i] = a(xs[i], ys[i]);
        mean += ws[i] * vals[i];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = vals[i] - mean;
        var += ws[i] * ws[i] * d * d;
    }
    return {mean, std::sqrt(var)};
}

inline void push_particles(std::vector<double>& xs, std::vector<double>& ys,
                           const LoziParams& params) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double nx = 1.0 + ys[i] - params.a * std::fabs(xs[i]);
        ys[i] = params.b * xs[i];
        xs[i] = nx;
    }
}

}  // namespace detail

// Weighted n-step forecast of a: sum_i w_i a(f^n(x_i)).  Plain doubles: this
// is a statistical experiment, not an enclosure.
inline Forecast forecast(const Ensemble& e, const LoziParams& params, const Observable& a,
                         std::uint64_t n) {
    if (e.x.empty()) throw DomainError("forecast: empty ensemble");
    if (!a) throw DomainError("forecast: missing observable");
    std::vector<double> xs = e.x, ys = e.y;
    for (std::uint64_t k = 0; k < n; ++k) detail::push_particles(xs, ys, params);
    return detail::weighted_stats(xs, ys, e.w, a);
}

struct BayesOptions {
    std::size_t count = 200000;          // prior ensemble size
    std::uint64_t burn_in = 1000;
    std::uint64_t stride = 16;           // orbit thinning between particles
    double tol0 = 1e-3;                  // zero-noise selection band
    std::uint64_t srb_points = 1000000;  // climatology orbit length
    std::uint64_t srb_batches = 100;     // batch-means standard error
};

struct ForecastPoint {
    std::uint64_t n;
    double estimate;   // weighted forecast of A
    double se;         // weighted standard error
    double abs_error;  // |estimate - climatology|
    double stat_err;   // se combined with the climatology uncertainty
};

struct ForecastCurve {
    double sigma;
    double y_obs;     // realized observation
    double h_error0;  // |posterior mean of H - H(truth)| before any push
    std::vector<ForecastPoint> points;
};

struct ForecastDecay {
    std::vector<ForecastCurve> curves;
    double srb_mean = 0.0;  // climatology of A
    double srb_se = 0.0;
    double truth_x = 0.0;
    double truth_y = 0.0;
    double tol0 = 0.0;
};

// Decay of forecast skill to climatology for one hidden truth point.  A single
// standard normal draw is scaled by each sigma (common random numbers), so the
// curves differ only by noise amplitude, not by realization luck.
inline ForecastDecay forecast_decay_experiment(const LoziParams& params, const Observable& h,
                                               const Observable& a,
                                               const std::vector<double>& sigmas,
                                               std::uint64_t n_max, std::uint64_t seed,
                                               const BayesOptions& opts = {}) {
    if (!h || !a) throw DomainError("forecast_decay_experiment: missing observable");
    if (sigmas.empty()) throw DomainError("forecast_decay_experiment: empty noise list");
    if (opts.srb_batches < 2 || opts.srb_points < opts.srb_batches)
        throw DomainError("forecast_decay_experiment: bad climatology batching");

    ForecastDecay out;
    out.tol0 = opts.tol0;

    {  // climatology of a from an independent batched orbit
        auto g = rng_stream(seed, "bayes-srb", 0);
        double x = 0.2 + 0.1 * g.next_unit();
        double y = 0.1 * g.next_unit();
        for (std::uint64_t i = 0; i < opts.burn_in; ++i) {
            const double nx = 1.0 + y - params.a * std::fabs(x);
            y = params.b * x;
            x = nx;
        }
        const std::uint64_t batch_len = opts.srb_points / opts.srb_batches;
        std::vector<double> batches;
        batches.reserve(opts.srb_batches);
        for (std::uint64_t b = 0; b < opts.srb_batches; ++b) {
            double acc = 0.0;
            for (std::uint64_t i = 0; i < batch_len; ++i) {
                const double nx = 1.0 + y - params.a * std::fabs(x);
                y = params.b * x;
                x = nx;
                acc += a(x, y);
            }
            batches.push_back(acc / static_cast<double>(batch_len));
        }
        double mean = 0.0;
        for (const double b : batches) mean += b;
        mean /= static_cast<double>(batches.size());
        double var = 0.0;
        for (const double b : batches) var += (b - mean) * (b - mean);
        var /= static_cast<double>(batches.size() - 1);
        out.srb_mean = mean;
        out.srb_se = std::sqrt(var / static_cast<double>(batches.size()));
    }

    auto tg = rng_stream(seed, "bayes-truth", 0);
    double tx = 0.2 + 0.1 * tg.next_unit();
    double ty = 0.1 * tg.next_unit();
    for (std::uint64_t i = 0; i < opts.burn_in; ++i) {
        const double nx = 1.0 + ty - params.a * std::fabs(tx);
        ty = params.b * tx;
        tx = nx;
    }
    out.truth_x = tx;
    out.truth_y = ty;
    const double z = tg.next_normal();

    const Ensemble prior = prior_from_srb(params, opts.count, seed, opts.burn_in, opts.stride);
    for (const double s : sigmas) {
        if (s < 0.0) throw DomainError("forecast_decay_experiment: negative noise level");
        const Observation obs{h, h(tx, ty) + (std::isinf(s) ? 0.0 : s * z), s, opts.tol0};
        const Ensemble post = bayes_update(prior, obs);
        ForecastCurve curve{s, obs.y, 0.0, {}};
        curve.h_error0 =
            std::fabs(detail::weighted_stats(post.x, post.y, post.w, h).estimate - h(tx, ty));
        // one push per lag over a shared particle array
        std::vector<double> xs = post.x, ys = post.y;
        for (std::uint64_t n = 0; n <= n_max; ++n) {
            if (n > 0) detail::push_particles(xs, ys, params);
            const Forecast f = detail::weighted_stats(xs, ys, post.w, a);
            curve.points.push_back({n, f.estimate, f.se, std::fabs(f.estimate - out.srb_mean),
                                    std::sqrt(f.se * f.se + out.srb_se * out.srb_se)});
        }
        out.curves.push_back(std::move(curve));
    }
    return out;
}

}  // namespace condmix
