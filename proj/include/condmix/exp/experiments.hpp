#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "condmix/baker/map.hpp"
#include "condmix/baker/spectral.hpp"
#include "condmix/bayes/filter.hpp"
#include "condmix/errors.hpp"
#include "condmix/exp/config.hpp"
#include "condmix/geometry/covering.hpp"
#include "condmix/io/csv.hpp"
#include "condmix/lozi/map.hpp"
#include "condmix/lozi/segment.hpp"
#include "condmix/stats/accumulator.hpp"
#include "condmix/stats/rng.hpp"
#include "condmix/stats/student.hpp"

namespace condmix {

struct RunOutput {
    Table table;
    nlohmann::ordered_json summary;  // deterministic result scalars for the manifest
};

namespace detail {

// Replica-indexed work with results written into caller-owned slots; the
// reduction afterwards walks slots in index order, so any thread count gives
// identical bytes.
template <class Body>
inline void parallel_replicas(std::uint64_t count, unsigned threads, Body&& body) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(threads == 0 ? 1 : threads, count));
    if (workers <= 1) {
        for (std::uint64_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t r = next.fetch_add(1);
                if (r >= count || failed.load()) return;
                try {
                    body(r);
                } catch (...) {
                    {
                        const std::scoped_lock lock(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// Plug-in observables with a validated enclosure form and a plain form.
struct LoziObservable {
    std::function<Interval(const IntervalVec2&)> enclosure;
    Observable pointwise;
};

inline LoziObservable lozi_observable(const std::string& name) {
    if (name == "2x")
        return {[](const IntervalVec2& p) { return Interval(2.0) * p.x; },
                [](double x, double) { return 2.0 * x; }};
    if (name == "absx")  // piecewise-smooth example, kinked on the singular line
        return {[](const IntervalVec2& p) { return abs(p.x); },
                [](double x, double) { return std::fabs(x); }};
    throw ConfigError("field 'observable': unknown observable '" + name + "'");
}

inline Observable baker_observable(const std::string& name, const std::string& key) {
    if (name == "2x") return [](double x, double) { return 2.0 * x; };
    if (name == "sin")
        return [](double x, double) { return std::sin(2.0 * std::numbers::pi * x); };
    throw ConfigError("field '" + key + "': unknown observable '" + name + "'");
}

inline Foliation baker_foliation(const std::string& psi) {
    if (psi == "curved")
        return {[](double y) { return 0.5 * y * y + 0.5 * y; }, [](double y) { return y + 0.5; },
                [](double) { return 1.0; }, 0.0, 0.0};
    return {[](double y) { return y; }, [](double) { return 1.0; }, [](double) { return 0.0; },
            0.0, 0.0};
}

// Conditional-mixing decay on the slice {x = x0}: validated interval ratio
// estimators per replica, independent plain-double climatology baselines, and
// a Student-t interval over the per-replica differences.
inline RunOutput run_lozi_cond_mix(const RunConfig& cfg) {
    const LoziParams params(cfg.a, cfg.b);
    const LoziObservable a_fn = lozi_observable(cfg.observable);
    const std::uint64_t lags = cfg.n_max + 1;

    struct ReplicaResult {
        std::vector<double> q;    // ratio midpoint minus climatology, per lag
        std::vector<double> rad;  // deterministic radius of the ratio, per lag
        std::uint64_t hits = 0;
    };
    std::vector<ReplicaResult> rep(cfg.replicas);

    detail::parallel_replicas(cfg.replicas, cfg.threads, [&](std::uint64_t r) {
        auto g = rng_stream(cfg.seed, "lozi-cond-mix", r);
        SegmentState st = init_segment(params);
        // Overlap-event corrections multiply into every later sample; at
        // working precision they are exactly 1 almost surely.
        Interval trajw(1.0);
        for (std::uint64_t i = 0; i < cfg.n_init; ++i) {
            auto [next, rec] = segment_step(std::move(st), g.next_u64(), StepMode::reweight);
            st = std::move(next);
            trajw = trajw * rec.weight;
        }
        std::vector<BirkhoffAccumulator<Interval>> acc(lags);
        ReplicaResult out;
        for (std::uint64_t i = 0; i < cfg.samples; ++i) {
            auto [next, rec] = segment_step(std::move(st), g.next_u64(), StepMode::reweight);
            st = std::move(next);
            trajw = trajw * rec.weight;
            const auto s = slice_sample(st, cfg.x0);
            if (!s) continue;
            ++out.hits;
            const Interval w = s->weight * trajw;
            IntervalVec2 p = s->point;
            for (std::uint64_t n = 0; n < lags; ++n) {
                if (n > 0) p = point_orbit(p, 1, params);
                accumulate(acc[n], w, a_fn.enclosure(p));
            }
        }
        auto gs = rng_stream(cfg.seed, "lozi-cond-mix-srb", r);
        double x = 0.2 + 0.1 * gs.next_unit(), y = 0.1 * gs.next_unit();
        for (std::uint64_t i = 0; i < cfg.n_init; ++i) {
            const double nx = 1.0 + y - params.a * std::fabs(x);
            y = params.b * x;
            x = nx;
        }
        const std::uint64_t n_srb = 10 * cfg.samples;
        double sum = 0.0;
        for (std::uint64_t i = 0; i < n_srb; ++i) {
            const double nx = 1.0 + y - params.a * std::fabs(x);
            y = params.b * x;
            x = nx;
            sum += a_fn.pointwise(x, y);
        }
        const double srb = sum / static_cast<double>(n_srb);
        for (std::uint64_t n = 0; n < lags; ++n) {
            const Interval rn = ratio(acc[n]);
            out.q.push_back(rn.mid_double() - srb);
            out.rad.push_back(0.5 * rn.width());
        }
        rep[r] = std::move(out);
    });

    Table tbl;
    tbl.header = {"n", "estimate_mid", "det_err", "stat_err", "replicas", "samples"};
    std::uint64_t total_hits = 0;
    for (const auto& rr : rep) total_hits += rr.hits;
    for (std::uint64_t n = 0; n < lags; ++n) {
        ReplicaEstimate est;
        for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
            est.means.push_back(rep[r].q[n]);
            est.radii.push_back(rep[r].rad[n]);
        }
        const StudentCi ci = student_ci(est, cfg.level);
        tbl.rows.push_back({csv_num(n), csv_num(ci.mean), csv_num(est.det_radius()),
                            csv_num(ci.halfwidth), csv_num(cfg.replicas), csv_num(total_hits)});
    }
    nlohmann::ordered_json summary;
    summary["total_slice_samples"] = total_hits;
    return {std::move(tbl), std::move(summary)};
}

// Weighted histogram of the slice ordinate: the conditional-density figure.
inline RunOutput run_lozi_cond_hist(const RunConfig& cfg) {
    const LoziParams params(cfg.a, cfg.b);
    auto g = rng_stream(cfg.seed, "lozi-cond-hist", 0);
    SegmentState st = init_segment(params);
    Interval trajw(1.0);
    for (std::uint64_t i = 0; i < cfg.n_init; ++i) {
        auto [next, rec] = segment_step(std::move(st), g.next_u64(), StepMode::reweight);
        st = std::move(next);
        trajw = trajw * rec.weight;
    }
    std::map<std::int64_t, std::pair<double, std::uint64_t>> bins;
    double total = 0.0;
    std::uint64_t hits = 0;
    SliceStats stats;
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        auto [next, rec] = segment_step(std::move(st), g.next_u64(), StepMode::reweight);
        st = std::move(next);
        trajw = trajw * rec.weight;
        const auto s = slice_sample(st, cfg.x0, &stats);
        if (!s) continue;
        ++hits;
        const double w = (s->weight * trajw).mid_double();
        const auto idx =
            static_cast<std::int64_t>(std::floor(s->point.y.mid_double() / cfg.bin_width));
        bins[idx].first += w;
        bins[idx].second += 1;
        total += w;
    }
    if (!(total > 0.0)) throw EmptyEstimate("lozi-cond-hist: no slice samples at this x0");
    Table tbl;
    tbl.header = {"bin_lo", "bin_hi", "mass", "count"};
    for (const auto& [idx, wc] : bins) {
        const double lo = static_cast<double>(idx) * cfg.bin_width;
        tbl.rows.push_back({csv_num(lo), csv_num(lo + cfg.bin_width), csv_num(wc.first / total),
                            csv_num(wc.second)});
    }
    nlohmann::ordered_json summary;
    summary["slice_samples"] = hits;
    summary["ambiguous_dropped"] = stats.ambiguous;
    summary["nonzero_bins"] = bins.size();
    return {std::move(tbl), std::move(summary)};
}

// Hausdorff distance of the pushed slice to the attractor, per lag.
inline RunOutput run_lozi_covering(const RunConfig& cfg) {
    const LoziParams params(cfg.a, cfg.b);
    CloudOptions opts;
    opts.h = cfg.h;
    opts.n_init = cfg.n_init;
    opts.slice_jitter = cfg.slice_jitter;
    const CoveringCurve curve = covering_curve(params, cfg.x0, cfg.n_max, cfg.samples, cfg.seed,
                                               cfg.attractor_points, cfg.burn_in, opts);
    Table tbl;
    tbl.header = {"n", "d_n", "h", "occupied_a", "occupied_b"};
    for (const auto& p : curve.points)
        tbl.rows.push_back({csv_num(p.n), csv_num(p.d), csv_num(curve.h),
                            csv_num(static_cast<std::uint64_t>(p.occupied_image)),
                            csv_num(static_cast<std::uint64_t>(curve.occupied_attractor))});
    nlohmann::ordered_json summary;
    summary["occupied_attractor"] = curve.occupied_attractor;
    return {std::move(tbl), std::move(summary)};
}

// Conditional-measure correlation decay for the baker's map.
inline RunOutput run_baker_mix(const RunConfig& cfg) {
    const BakerMap map = BakerMap::linear(static_cast<int>(cfg.k), cfg.mu, cfg.offsets);
    const Foliation fol = baker_foliation(cfg.psi);
    const Observable a = baker_observable(cfg.a_obs, "a_obs");
    const Observable b = baker_observable(cfg.b_obs, "b_obs");
    const CorrelationSeries series =
        mixing_correlation(map, fol, cfg.t, a, b, static_cast<int>(cfg.n_max), cfg.samples,
                           cfg.replicas, cfg.seed, cfg.level);
    Table tbl;
    tbl.header = {"n", "estimate_mid", "det_err", "stat_err", "replicas", "samples"};
    for (const auto& p : series.points)
        tbl.rows.push_back({csv_num(static_cast<std::uint64_t>(p.n)), csv_num(p.estimate),
                            csv_num(0.0), csv_num(p.ci_halfwidth),
                            csv_num(static_cast<std::uint64_t>(series.replicas)),
                            csv_num(static_cast<std::uint64_t>(series.samples * series.replicas))});
    nlohmann::ordered_json summary;
    summary["samples_per_replica"] = series.samples;
    return {std::move(tbl), std::move(summary)};
}

// Fourier magnitudes of the leaf-parameter pushforward; the fitted decay
// exponent goes to the manifest (the control case legitimately has no fit).
inline RunOutput run_baker_fourier(const RunConfig& cfg) {
    const BakerMap map = BakerMap::linear(static_cast<int>(cfg.k), cfg.mu, cfg.offsets);
    const Foliation fol = baker_foliation(cfg.psi);
    auto rng = rng_stream(cfg.seed, "baker-fourier", 0);
    const std::vector<double> mags =
        fourier_magnitudes(map, fol, static_cast<int>(cfg.j_max), cfg.samples, rng);
    const double floor_level = 3.0 / std::sqrt(static_cast<double>(cfg.samples));
    Table tbl;
    tbl.header = {"j", "magnitude", "floor"};
    for (std::size_t j = 0; j < mags.size(); ++j)
        tbl.rows.push_back(
            {csv_num(static_cast<std::uint64_t>(j)), csv_num(mags[j]), csv_num(floor_level)});
    nlohmann::ordered_json summary;
    try {
        const FourierResult fit = fourier_fit(mags, cfg.samples);
        summary["eta"] = fit.eta;
        summary["r2"] = fit.r2;
        summary["used"] = fit.used;
    } catch (const FitError&) {
        summary["eta"] = nullptr;  // everything at the noise floor: no decay to fit
    } catch (const DomainError&) {
        summary["eta"] = nullptr;  // j_max too small for a fit
    }
    return {std::move(tbl), std::move(summary)};
}

// Forecast-skill decay to climatology across observation noise levels.
inline RunOutput run_bayes_forecast(const RunConfig& cfg) {
    const LoziParams params(cfg.a, cfg.b);
    const Observable h = [](double x, double) { return x; };
    const Observable a = lozi_observable(cfg.observable).pointwise;
    BayesOptions opts;
    opts.count = cfg.ensemble;
    opts.burn_in = cfg.burn_in;
    opts.tol0 = cfg.tol0;
    opts.srb_points = cfg.srb_points;
    const ForecastDecay dec =
        forecast_decay_experiment(params, h, a, cfg.sigma_list, cfg.n_max, cfg.seed, opts);
    Table tbl;
    tbl.header = {"sigma", "n", "abs_error", "stat_err"};
    for (const auto& c : dec.curves)
        for (const auto& p : c.points)
            tbl.rows.push_back(
                {csv_num(c.sigma), csv_num(p.n), csv_num(p.abs_error), csv_num(p.stat_err)});
    nlohmann::ordered_json summary;
    summary["srb_mean"] = dec.srb_mean;
    summary["srb_se"] = dec.srb_se;
    summary["truth_x"] = dec.truth_x;
    summary["truth_y"] = dec.truth_y;
    summary["tol0"] = dec.tol0;
    nlohmann::ordered_json curves = nlohmann::ordered_json::array();
    for (const auto& c : dec.curves) {
        nlohmann::ordered_json cj;
        cj["sigma"] = c.sigma;
        cj["y_obs"] = c.y_obs;
        cj["h_error0"] = c.h_error0;
        curves.push_back(std::move(cj));
    }
    summary["curves"] = std::move(curves);
    return {std::move(tbl), std::move(summary)};
}

inline RunOutput run_experiment(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.experiment == "lozi-cond-hist") return run_lozi_cond_hist(cfg);
    if (cfg.experiment == "lozi-cond-mix") return run_lozi_cond_mix(cfg);
    if (cfg.experiment == "lozi-covering") return run_lozi_covering(cfg);
    if (cfg.experiment == "baker-mix") return run_baker_mix(cfg);
    if (cfg.experiment == "baker-fourier") return run_baker_fourier(cfg);
    if (cfg.experiment == "bayes-forecast") return run_bayes_forecast(cfg);
    throw ConfigError("experiment '" + cfg.experiment + "' has no driver");
}

// Everything needed to reproduce a run, plus small result scalars.
inline nlohmann::ordered_json manifest_json(const RunConfig& cfg,
                                            const nlohmann::ordered_json& summary) {
    nlohmann::ordered_json m;
    m["config"] = config_json(cfg);
    m["versions"] = nlohmann::ordered_json{
        {"condmix", "0.1.0"}, {"mpfr", MPFR_VERSION_STRING}, {"compiler", __VERSION__}};
    m["summary"] = summary;
    return m;
}

}  // namespace condmix
