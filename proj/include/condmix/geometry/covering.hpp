#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "condmix/errors.hpp"
#include "condmix/geometry/grid.hpp"
#include "condmix/lozi/map.hpp"
#include "condmix/lozi/segment.hpp"
#include "condmix/stats/rng.hpp"

namespace condmix {

struct CloudOptions {
    Box box{-1.5, 1.5, -1.5, 1.5};
    double h = 0.01;
    std::uint64_t n_init = 1000;              // segment spin-up before slicing
    std::uint64_t max_attempts_factor = 200;  // slice acceptance cap
    double slice_jitter = 0.5;                // x0 spread in cells; 0 = exact line
};

// Occupied cells of a long plain-double orbit after burn-in.  The attractor
// cloud is a statistical picture (double rounding is far below cell size);
// the slice pushes below stay fully validated.
inline GridCover attractor_cloud(const LoziParams& params, std::uint64_t n_points,
                                 std::uint64_t burn_in, std::uint64_t seed,
                                 const CloudOptions& opts = {}) {
    if (!params.flags.chaotic) throw DomainError("attractor_cloud: parameters not chaotic");
    GridCover cover(opts.box, opts.h);
    if (n_points == 0) return cover;
    auto g = rng_stream(seed, "attractor-cloud", 0);
    double x = 0.2 + 0.1 * g.next_unit();
    double y = 0.1 * g.next_unit();
    for (std::uint64_t i = 0; i < burn_in + n_points; ++i) {
        const double nx = 1.0 + y - params.a * std::fabs(x);
        y = params.b * x;
        x = nx;
        if (x < opts.box.xmin || x > opts.box.xmax || y < opts.box.ymin || y > opts.box.ymax)
            throw EscapeError("attractor_cloud: orbit left the bounding box");
        if (i >= burn_in) cover.insert(x, y);
    }
    return cover;
}

// Validated equilibrium samples of the slice {x = x0} via segment dynamics.
// With slice_jitter > 0 the abscissa is resolved at grid scale: each sample
// lies on an exact vertical line drawn uniformly within that spread.  The
// exact slice meets the attractor in a transverse Cantor set whose pushed
// images gain cells too slowly to fill the cloud; the grid-scale slab holds
// positive-length arcs and fills at the theoretical rate.
inline std::vector<IntervalVec2> slice_points(const LoziParams& params, double x0,
                                              std::size_t m_points, std::uint64_t seed,
                                              const CloudOptions& opts = {},
                                              SliceStats* stats = nullptr) {
    SegmentState st = init_segment(params);
    auto g = rng_stream(seed, "slice-points", 0);
    for (std::uint64_t i = 0; i < opts.n_init; ++i)
        st = segment_step(std::move(st), g.next_u64(), StepMode::reweight).first;
    std::vector<IntervalVec2> pts;
    pts.reserve(m_points);
    const double spread = opts.slice_jitter * opts.h;
    const std::uint64_t cap = opts.max_attempts_factor * m_points;
    for (std::uint64_t attempts = 0; pts.size() < m_points && attempts < cap; ++attempts) {
        st = segment_step(std::move(st), g.next_u64(), StepMode::reweight).first;
        const double xs = spread > 0.0 ? x0 + (g.next_unit() - 0.5) * 2.0 * spread : x0;
        if (const auto s = slice_sample(st, xs, stats)) pts.push_back(s->point);
    }
    if (pts.size() < m_points)
        throw EmptyError("slice_points: slice acceptance too low at this x0");
    return pts;
}

inline GridCover slice_image_cloud(const LoziParams& params, double x0, std::uint64_t n,
                                   std::size_t m_points, std::uint64_t seed,
                                   const CloudOptions& opts = {}) {
    auto pts = slice_points(params, x0, m_points, seed, opts);
    GridCover cover(opts.box, opts.h);
    for (const auto& p : pts) {
        const IntervalVec2 q = point_orbit(p, n, params);
        cover.insert(q.x.midpoint().to_double(), q.y.midpoint().to_double());
    }
    return cover;
}

struct CoveringPoint {
    std::uint64_t n;
    double d;
    std::size_t occupied_image;
};

struct CoveringCurve {
    std::vector<CoveringPoint> points;
    double h = 0.0;
    std::size_t occupied_attractor = 0;
};

// d_n = hausdorff(pushforward of the slice, attractor), one validated push
// per lag over a shared sample set.
inline CoveringCurve covering_curve(const LoziParams& params, double x0, std::uint64_t n_max,
                                    std::size_t m_points, std::uint64_t seed,
                                    std::uint64_t attractor_points = 1000000,
                                    std::uint64_t burn_in = 1000,
                                    const CloudOptions& opts = {}) {
    const GridCover attr = attractor_cloud(params, attractor_points, burn_in, seed, opts);
    auto pts = slice_points(params, x0, m_points, seed, opts);
    CoveringCurve out;
    out.h = opts.h;
    out.occupied_attractor = attr.occupied_count();
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        GridCover cover(opts.box, opts.h);
        for (const auto& p : pts)
            cover.insert(p.x.midpoint().to_double(), p.y.midpoint().to_double());
        out.points.push_back({n, hausdorff(cover, attr), cover.occupied_count()});
        if (n < n_max)
            for (auto& p : pts) p = point_orbit(p, 1, params);
    }
    return out;
}

}  // namespace condmix
