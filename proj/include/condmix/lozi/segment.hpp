#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>

#include "condmix/errors.hpp"
#include "condmix/interval/linear2.hpp"
#include "condmix/lozi/map.hpp"

namespace condmix {

enum class StepMode { abort_on_overlap, reweight };

struct SegmentOptions {
    double width_threshold = 1e-30;  // stability guard on every stored width
    double beta_bound = 1e6;         // transversality guard on |s/c|
    double bbox = 1.5;               // attractor bounding box half-width
    double qr_width_factor = 8.0;
};

// A directed piece of local unstable manifold, stored in a rotated frame in
// which both endpoints share the second coordinate: real point = Q*(x', ys).
struct SegmentState {
    LoziParams params;
    Rotation2 Q;
    Interval xp, xq;   // rotated-frame first coordinates, xp < xq certified
    Interval yshared;  // common rotated-frame second coordinate
    bool dir;          // false when initialized with reversed orientation
    std::uint64_t step_count = 0;
    SegmentOptions opts;
};

struct CutRecord {
    bool was_cut = false;
    Interval tstar = Interval::empty();
    bool chose_left = false;
    bool overlap_event = false;          // draw landed inside the tstar enclosure
    Interval weight = Interval(1.0);     // surrogate correction in reweight mode
};

struct WeightedSample {
    IntervalVec2 point;
    Interval weight;  // 1/length of the sliced segment
};

struct SliceStats {
    std::uint64_t ambiguous = 0;  // straddle events dropped for lack of a certificate
};

inline IntervalVec2 real_p(const SegmentState& st) {
    return st.Q.apply({st.xp, st.yshared});
}
inline IntervalVec2 real_q(const SegmentState& st) {
    return st.Q.apply({st.xq, st.yshared});
}
inline Interval segment_length(const SegmentState& st) { return st.xq - st.xp; }

namespace detail {

inline int certified_sign(const Interval& v) {
    if (v.certainly_positive()) return 1;
    if (v.certainly_negative()) return -1;
    return 0;
}

}  // namespace detail

// Seed segment from p0 = (2/(2 + a - a^2 + 4b), 0) to its image.  With
// reversed set, the stored direction runs from the image back to p0, which
// selects the other ergodic orientation component.
inline SegmentState init_segment(const LoziParams& params, const SegmentOptions& opts = {},
                                 bool reversed = false) {
    if (!params.flags.chaotic)
        throw InitError("init_segment: parameters outside the chaotic region");
    const mpfr_prec_t prec = default_precision();
    const Interval a(params.a, prec), b(params.b, prec);
    const Interval den = 2.0 + a - a * a + 4.0 * b;
    if (!den.certainly_positive()) throw InitError("init_segment: degenerate seed formula");
    const IntervalVec2 p0{Interval(2.0, prec) / den, Interval(0.0, prec)};
    const IntervalVec2 q0 = lozi_eval(p0, params);

    const IntervalVec2& from = reversed ? q0 : p0;
    const IntervalVec2& to = reversed ? p0 : q0;
    const IntervalVec2 d = to - from;
    if (d.x.contains_zero() && d.y.contains_zero())
        throw InitError("init_segment: seed point is fixed");
    const Rotation2 Q = Rotation2::from_angle(atan2(d.y, d.x));
    const IntervalVec2 fp = Q.apply_transpose(from);
    const IntervalVec2 tp = Q.apply_transpose(to);
    const Interval ys = intersect(fp.y, tp.y);
    if (ys.is_empty()) throw InitError("init_segment: frame alignment failed");

    SegmentState st{params, Q, fp.x, tp.x, ys, !reversed, 0, opts};
    if (!segment_length(st).certainly_positive())
        throw InitError("init_segment: endpoints not certainly ordered");
    return st;
}

// One step of the implicit random dynamics.  u is the raw 64-bit draw and
// denotes the dyadic rational u/2^64 in [0,1); keeping it integral preserves
// all 64 bits for the certified comparison against t_*.
inline std::pair<SegmentState, CutRecord> segment_step(SegmentState st, std::uint64_t u,
                                                       StepMode mode) {
    const mpfr_prec_t prec = st.yshared.precision();
    const Interval& c = st.Q.c;
    const Interval& s = st.Q.s;

    if (!segment_length(st).certainly_positive())
        throw StabilityError("segment_step: endpoints not certainly ordered");
    if (c.contains_zero())
        throw StabilityError("segment_step: frame tangent to the singular line");
    const Interval beta = s / c;
    if (beta.mag() > st.opts.beta_bound)
        throw StabilityError("segment_step: transversality bound exceeded");

    // Certified real-frame x signs of both endpoints.
    const Interval px_p = c * st.xp - s * st.yshared;
    const Interval px_q = c * st.xq - s * st.yshared;
    const int sp = detail::certified_sign(px_p);
    const int sq = detail::certified_sign(px_q);
    if (sp == 0 || sq == 0)
        throw BranchAmbiguityError("segment_step: endpoint sign not certifiable");

    CutRecord rec;
    rec.weight = Interval(1.0, prec);
    int sigma = sp;
    if (sp != sq) {
        // Cut at the singular line, which reads x' = beta * ys in this frame.
        const Interval xs = beta * st.yshared;
        const Interval t =
            intersect((xs - st.xp) / (st.xq - st.xp), Interval(0.0, 1.0, prec));
        if (t.is_empty()) throw StabilityError("segment_step: cut parameter escaped [0,1]");
        rec.was_cut = true;
        rec.tstar = t;

        const MpReal ud = dyadic_unit(u, prec);
        const bool below = ud < t.lo();
        const bool above = ud >= t.hi();
        if (!below && !above) {
            rec.overlap_event = true;
            if (mode == StepMode::abort_on_overlap)
                throw OverlapError("segment_step: draw landed inside the cut enclosure");
        }
        if (mode == StepMode::abort_on_overlap) {
            rec.chose_left = below;
        } else {
            // Sample against the midpoint surrogate t** and carry the
            // enclosure of the correction t_*/t** (resp. complement).
            const MpReal tmid = t.midpoint();
            rec.chose_left = ud < tmid;
            const Interval tm(tmid);
            const Interval numer = rec.chose_left ? t : 1.0 - t;
            const Interval denom = rec.chose_left ? tm : 1.0 - tm;
            if (!denom.certainly_positive())
                throw StabilityError("segment_step: degenerate reweight denominator");
            rec.weight = numer / denom;
        }
        if (rec.chose_left) {
            st.xq = xs;  // keep [p, s], which lies on side sp
        } else {
            st.xp = xs;  // keep [s, q], which lies on side sq
            sigma = sq;
        }
    }

    // Affine branch update J*Q with J = [[-sigma a, 1],[b, 0]], offset e1.
    const double sa = sigma * st.params.a;
    const IntervalMat2 m{-sa * c + s, sa * s + c, st.params.b * c, -st.params.b * s};
    const Qr2Result f = qr2(m, st.opts.qr_width_factor);
    if (!f.r.r11.certainly_positive())
        throw StabilityError("segment_step: expansion factor not certainly positive");
    Interval new_xp = f.r.r11 * st.xp + f.r.r12 * st.yshared + f.q.c;
    Interval new_xq = f.r.r11 * st.xq + f.r.r12 * st.yshared + f.q.c;
    Interval new_ys = f.r.r22 * st.yshared - f.q.s;
    st.Q = f.q;
    st.xp = std::move(new_xp);
    st.xq = std::move(new_xq);
    st.yshared = std::move(new_ys);
    st.step_count += 1;

    const double w =
        std::max({st.Q.max_width(), st.yshared.width(), st.xp.width(), st.xq.width()});
    if (w > st.opts.width_threshold)
        throw StabilityError("segment_step: stored widths exceeded threshold");
    for (const IntervalVec2& e : {real_p(st), real_q(st)}) {
        if (e.x.mag() > st.opts.bbox || e.y.mag() > st.opts.bbox)
            throw EscapeError("segment_step: endpoint left the attractor bounding box");
    }
    return {std::move(st), std::move(rec)};
}

// Intersection of the segment with the vertical line x = x0, weighted by the
// reciprocal segment length.  Events whose geometry cannot be certified are
// dropped (and counted) rather than guessed.
inline std::optional<WeightedSample> slice_sample(const SegmentState& st, double x0,
                                                  SliceStats* stats = nullptr) {
    const mpfr_prec_t prec = st.yshared.precision();
    const Interval& c = st.Q.c;
    const Interval& s = st.Q.s;
    const Interval dp = c * st.xp - s * st.yshared - x0;
    const Interval dq = c * st.xq - s * st.yshared - x0;
    const int sp = detail::certified_sign(dp);
    const int sq = detail::certified_sign(dq);
    if (sp == 0 || sq == 0) {
        if (stats) stats->ambiguous += 1;
        return std::nullopt;
    }
    if (sp == sq) return std::nullopt;
    const Interval len = segment_length(st);
    if (c.contains_zero() || !len.certainly_positive()) {
        if (stats) stats->ambiguous += 1;
        return std::nullopt;
    }
    const Interval xs = (x0 + s * st.yshared) / c;  // solve c x' - s ys = x0
    const Interval y = s * xs + c * st.yshared;
    return WeightedSample{{Interval(x0, prec), y}, Interval(1.0, prec) / len};
}

}  // namespace condmix
