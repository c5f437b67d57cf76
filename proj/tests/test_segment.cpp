#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "condmix/lozi/segment.hpp"
#include "condmix/stats/rng.hpp"

namespace {

using condmix::Interval;
using condmix::LoziParams;
using condmix::MpReal;
using condmix::Rotation2;
using condmix::SegmentOptions;
using condmix::SegmentState;
using condmix::StepMode;

SegmentState make_state(const LoziParams& pr, const Interval& theta, double xp, double xq,
                        double ys, SegmentOptions opts = {}) {
    return SegmentState{pr,           Rotation2::from_angle(theta),
                        Interval(xp), Interval(xq),
                        Interval(ys), true,
                        0,            opts};
}

TEST(SegmentInit, SeedFormulaAndRoundTrip) {
    const LoziParams pr(1.8, 0.35);
    const auto st = condmix::init_segment(pr);
    EXPECT_TRUE(st.dir);

    // High-precision oracle for p0 = (2/(2 + a - a^2 + 4b), 0) and its image.
    const MpReal a(1.8, 512), b(0.35, 512);
    const MpReal den = MpReal(2.0, 512) + a - a * a + MpReal(4.0, 512) * b;
    const MpReal p0x = MpReal(2.0, 512) / den;
    const MpReal q0x = MpReal(1.0, 512) - a * p0x;
    const MpReal q0y = b * p0x;
    EXPECT_NEAR(p0x.to_double(), 2.0 / 1.96, 1e-12);

    const auto rp = condmix::real_p(st);
    const auto rq = condmix::real_q(st);
    EXPECT_TRUE(rp.x.contains(p0x));
    EXPECT_TRUE(rp.y.contains(0.0));
    EXPECT_TRUE(rq.x.contains(q0x));
    EXPECT_TRUE(rq.y.contains(q0y));
    EXPECT_LT(rp.max_width(), 1e-40);
    EXPECT_LT(rq.max_width(), 1e-40);
    EXPECT_TRUE(condmix::segment_length(st).certainly_positive());

    const auto rev = condmix::init_segment(pr, {}, true);
    EXPECT_FALSE(rev.dir);
    EXPECT_TRUE(condmix::real_p(rev).x.contains(q0x));
    EXPECT_TRUE(condmix::real_q(rev).x.contains(p0x));

    EXPECT_THROW(condmix::init_segment(LoziParams(1.0, 0.1)), condmix::InitError);
}

TEST(SegmentStep, NoCutInsidePositiveHalfPlane) {
    const LoziParams pr(1.8, 0.35);
    auto st = make_state(pr, Interval(0.0), 0.2, 0.5, 0.0);
    auto [st2, rec] = condmix::segment_step(st, 12345u, StepMode::abort_on_overlap);
    EXPECT_FALSE(rec.was_cut);
    EXPECT_TRUE(rec.tstar.is_empty());
    EXPECT_TRUE(rec.weight.contains(1.0));
    EXPECT_EQ(st2.step_count, 1u);

    // Both endpoints map under the x>0 branch: (x,y) -> (1 + y - 1.8x, 0.35x).
    const MpReal a(1.8, 512), b(0.35, 512);
    const MpReal px = MpReal(1.0, 512) - a * MpReal(0.2, 512);
    const MpReal qx = MpReal(1.0, 512) - a * MpReal(0.5, 512);
    const auto rp = condmix::real_p(st2);
    const auto rq = condmix::real_q(st2);
    EXPECT_TRUE(rp.x.contains(px));
    EXPECT_TRUE(rp.y.contains(b * MpReal(0.2, 512)));
    EXPECT_TRUE(rq.x.contains(qx));
    EXPECT_TRUE(rq.y.contains(b * MpReal(0.5, 512)));
}

TEST(SegmentStep, CutReplacesTheRightEndpoint) {
    const LoziParams pr(1.8, 0.35);

    // Symmetric straddling segment: t_* = 1/2 exactly; tiny u picks the left
    // child [p, s], and the cut point s = (0,0) maps to (1,0).
    {
        auto st = make_state(pr, Interval(0.0), -1.0, 1.0, 0.0);
        auto [st2, rec] = condmix::segment_step(st, 1u, StepMode::abort_on_overlap);
        EXPECT_TRUE(rec.was_cut);
        EXPECT_TRUE(rec.chose_left);
        EXPECT_FALSE(rec.overlap_event);
        EXPECT_TRUE(rec.tstar.contains(0.5));
        EXPECT_LT(rec.tstar.width(), 1e-50);
        const auto rp = condmix::real_p(st2);
        const auto rq = condmix::real_q(st2);
        EXPECT_TRUE(rp.x.contains(-0.8));   // f(-1,0) on the x<0 branch
        EXPECT_TRUE(rp.y.contains(-0.35));
        EXPECT_TRUE(rq.x.contains(1.0));    // f(0,0)
        EXPECT_TRUE(rq.y.contains(0.0));
    }

    // u near 1 picks the right child [s, q] on the x>0 branch.
    {
        auto st = make_state(pr, Interval(0.0), -1.0, 1.0, 0.0);
        auto [st2, rec] =
            condmix::segment_step(st, ~std::uint64_t{0}, StepMode::abort_on_overlap);
        EXPECT_TRUE(rec.was_cut);
        EXPECT_FALSE(rec.chose_left);
        const auto rp = condmix::real_p(st2);
        const auto rq = condmix::real_q(st2);
        EXPECT_TRUE(rp.x.contains(1.0));    // f(0,0)
        EXPECT_TRUE(rp.y.contains(0.0));
        EXPECT_TRUE(rq.x.contains(-0.8));   // f(1,0) on the x>0 branch
        EXPECT_TRUE(rq.y.contains(0.35));
    }
}

// Lockstep against an unrotated point-arithmetic simulation at 1500 bits fed
// the same draw sequence.  Its rounding error stays ~2^-500 over 10^3 steps,
// far inside the validated enclosures, so every enclosure must contain the
// oracle endpoint up to a 2^-400 slack.
TEST(SegmentStep, ThousandStepNaiveOracleLockstep) {
    const mpfr_prec_t hp = 1500;
    const LoziParams pr(1.8, 0.35);
    auto st = condmix::init_segment(pr);

    struct NaivePt {
        MpReal x, y;
    };
    const MpReal a(1.8, hp), b(0.35, hp);
    const MpReal den = MpReal(2.0, hp) + a - a * a + MpReal(4.0, hp) * b;
    NaivePt P{MpReal(2.0, hp) / den, MpReal(0.0, hp)};
    NaivePt Q{MpReal(1.0, hp) - a * P.x, b * P.x};

    auto g = condmix::rng_stream(2026, "oracle", 0);
    const MpReal slack(std::ldexp(1.0, -400), hp);
    const auto close = [&](const Interval& iv, const MpReal& o) {
        return iv.lo() - slack <= o && o <= iv.hi() + slack;
    };

    int cuts = 0;
    for (int n = 0; n < 1000; ++n) {
        const std::uint64_t u = g.next_u64();
        auto [st2, rec] = condmix::segment_step(st, u, StepMode::abort_on_overlap);
        st = std::move(st2);

        const int sp = P.x.sign();
        const int sq = Q.x.sign();
        ASSERT_NE(sp, 0);
        ASSERT_NE(sq, 0);
        ASSERT_EQ(rec.was_cut, sp != sq) << "step " << n;
        int sigma = sp;
        if (rec.was_cut) {
            ++cuts;
            const MpReal t = -P.x / (Q.x - P.x);
            const MpReal sy = P.y + t * (Q.y - P.y);
            const bool left = condmix::dyadic_unit(u, hp) < t;
            ASSERT_EQ(rec.chose_left, left) << "step " << n;
            if (left) {
                Q = NaivePt{MpReal(0.0, hp), sy};  // the cut point has x = 0 exactly
            } else {
                P = NaivePt{MpReal(0.0, hp), sy};
                sigma = sq;
            }
        }
        const MpReal sa = MpReal(static_cast<double>(sigma), hp) * a;
        const auto apply = [&](const NaivePt& z) {
            return NaivePt{MpReal(1.0, hp) + z.y - sa * z.x, b * z.x};
        };
        P = apply(P);
        Q = apply(Q);

        const auto rp = condmix::real_p(st);
        const auto rq = condmix::real_q(st);
        ASSERT_TRUE(close(rp.x, P.x)) << "step " << n;
        ASSERT_TRUE(close(rp.y, P.y)) << "step " << n;
        ASSERT_TRUE(close(rq.x, Q.x)) << "step " << n;
        ASSERT_TRUE(close(rq.y, Q.y)) << "step " << n;
    }
    EXPECT_GT(cuts, 100);
}

TEST(SegmentStep, StabilitySmokeTenThousandSteps) {
    const LoziParams pr(1.8, 0.35);
    auto st = condmix::init_segment(pr);
    auto g = condmix::rng_stream(101, "stability", 0);
    double max_w = 0.0;
    int cuts = 0;
    for (int n = 0; n < 10000; ++n) {
        auto [st2, rec] = condmix::segment_step(st, g.next_u64(), StepMode::abort_on_overlap);
        st = std::move(st2);
        cuts += rec.was_cut ? 1 : 0;
        max_w = std::max({max_w, st.Q.max_width(), st.yshared.width(), st.xp.width(),
                          st.xq.width()});
    }
    EXPECT_EQ(st.step_count, 10000u);
    EXPECT_LT(max_w, 1e-30);
    EXPECT_GT(cuts, 100);  // cutting happens on a positive fraction of steps
}

TEST(SegmentStep, ReweightAgreesOffOverlapAndWeightsEncloseOne) {
    const LoziParams pr(1.8, 0.35);
    auto sta = condmix::init_segment(pr);
    auto stb = condmix::init_segment(pr);
    auto ga = condmix::rng_stream(77, "reweight", 0);
    auto gb = condmix::rng_stream(77, "reweight", 0);
    Interval product(1.0);
    for (int n = 0; n < 500; ++n) {
        auto [sa, ra] = condmix::segment_step(sta, ga.next_u64(), StepMode::abort_on_overlap);
        auto [sb, rb] = condmix::segment_step(stb, gb.next_u64(), StepMode::reweight);
        sta = std::move(sa);
        stb = std::move(sb);
        ASSERT_EQ(ra.was_cut, rb.was_cut);
        ASSERT_EQ(ra.chose_left, rb.chose_left) << "step " << n;
        ASSERT_FALSE(rb.overlap_event);
        ASSERT_TRUE(rb.weight.contains(1.0));
        product = product * rb.weight;
    }
    EXPECT_TRUE(product.contains(1.0));
    EXPECT_LT(product.width(), 1e-30);
}

TEST(SegmentStep, ForcedOverlapAbortsOrReweights) {
    const LoziParams pr(1.8, 0.35);
    SegmentOptions loose;
    loose.width_threshold = 1.0;
    // An artificially wide frame angle inflates t_* to width ~1e-11, so a draw
    // at its midpoint certifiably lands inside the enclosure.
    const Interval theta(0.78539816339, 0.78539816349);
    auto st = make_state(pr, theta, -1.0, 1.0, 0.3, loose);
    const Interval beta = st.Q.s / st.Q.c;
    const Interval t = (beta * st.yshared - st.xp) / (st.xq - st.xp);
    const double tm = t.midpoint().to_double();
    const auto u = static_cast<std::uint64_t>(tm * std::ldexp(1.0, 64));

    EXPECT_THROW(condmix::segment_step(st, u, StepMode::abort_on_overlap),
                 condmix::OverlapError);
    auto [st2, rec] = condmix::segment_step(st, u, StepMode::reweight);
    EXPECT_TRUE(rec.was_cut);
    EXPECT_TRUE(rec.overlap_event);
    EXPECT_FALSE(rec.weight.is_empty());
    EXPECT_GT(rec.weight.mag(), 0.0);
    EXPECT_EQ(st2.step_count, 1u);
}

TEST(SegmentStep, GuardsThrow) {
    const LoziParams pr(1.8, 0.35);

    SegmentOptions tight;
    tight.width_threshold = 1e-60;  // below the 196-bit rounding floor
    auto st1 = make_state(pr, Interval(0.0), 0.2, 0.5, 0.0, tight);
    EXPECT_THROW(condmix::segment_step(st1, 1u, StepMode::abort_on_overlap),
                 condmix::StabilityError);

    auto st2 = make_state(pr, Interval(0.0), 10.0, 11.0, 0.0);
    EXPECT_THROW(condmix::segment_step(st2, 1u, StepMode::abort_on_overlap),
                 condmix::EscapeError);

    auto st3 = make_state(pr, Interval(0.0), 0.2, 0.5, 0.0);
    st3.xp = Interval(-1e-40, 1e-40);  // sign not certifiable
    EXPECT_THROW(condmix::segment_step(st3, 1u, StepMode::abort_on_overlap),
                 condmix::BranchAmbiguityError);

    auto st4 = make_state(pr, Interval(0.0), 0.5, 0.5, 0.0);  // degenerate length
    EXPECT_THROW(condmix::segment_step(st4, 1u, StepMode::abort_on_overlap),
                 condmix::StabilityError);
}

TEST(SegmentStep, DeterministicReplay) {
    const LoziParams pr(1.8, 0.35);
    std::vector<std::string> trace[2];
    for (int run = 0; run < 2; ++run) {
        auto st = condmix::init_segment(pr);
        auto g = condmix::rng_stream(5, "replay", 3);
        for (int n = 0; n < 300; ++n) {
            auto [st2, rec] =
                condmix::segment_step(st, g.next_u64(), StepMode::abort_on_overlap);
            st = std::move(st2);
            trace[run].push_back(std::to_string(rec.was_cut) +
                                 std::to_string(rec.chose_left) + to_string(rec.tstar));
        }
        trace[run].push_back(to_string(st.xp) + to_string(st.xq) +
                             to_string(st.yshared) + to_string(st.Q.c) +
                             to_string(st.Q.s));
    }
    EXPECT_EQ(trace[0], trace[1]);
}

TEST(SliceSample, TrivialGeometry) {
    const LoziParams pr(1.8, 0.35);
    const auto st = make_state(pr, Interval(0.0), -1.0, 1.0, 0.0);
    condmix::SliceStats stats;
    const auto hit = condmix::slice_sample(st, 0.0, &stats);
    ASSERT_TRUE(hit.has_value());
    EXPECT_TRUE(hit->point.x.contains(0.0));
    EXPECT_TRUE(hit->point.y.contains(0.0));
    EXPECT_TRUE(hit->weight.contains(0.5));
    EXPECT_LT(hit->weight.width(), 1e-55);
    EXPECT_EQ(stats.ambiguous, 0u);

    const auto off = make_state(pr, Interval(0.0), 0.2, 0.5, 0.0);
    EXPECT_FALSE(condmix::slice_sample(off, 0.0, &stats).has_value());
    EXPECT_EQ(stats.ambiguous, 0u);

    // Endpoint exactly on the slice line: not certifiable, dropped and counted.
    const auto edge = make_state(pr, Interval(0.0), 0.0, 0.5, 0.0);
    EXPECT_FALSE(condmix::slice_sample(edge, 0.0, &stats).has_value());
    EXPECT_EQ(stats.ambiguous, 1u);
}

TEST(SliceSample, RotatedFrameCrossing) {
    const LoziParams pr(1.8, 0.35);
    const double theta = 0.7853981633974483;
    const auto st = make_state(pr, Interval(theta), -1.0, 1.0, 0.3);
    const auto hit = condmix::slice_sample(st, 0.1);
    ASSERT_TRUE(hit.has_value());

    // Oracle: with c = cos(theta), s = sin(theta), the crossing has
    // x' = (x0 + 0.3 s)/c and real y = s x' + 0.3 c.
    const MpReal th(theta, 512);
    const MpReal c = cos(th), s = sin(th);
    const MpReal xs = (MpReal(0.1, 512) + MpReal(0.3, 512) * s) / c;
    const MpReal y = s * xs + MpReal(0.3, 512) * c;
    EXPECT_TRUE(hit->point.x.contains(0.1));
    EXPECT_TRUE(hit->point.y.contains(y));
    EXPECT_TRUE(hit->weight.contains(0.5));
}

TEST(SliceSample, DirectionReversalKeepsGeometry) {
    // The same physical segment stored with opposite orientation produces the
    // same slice point and weight.
    const LoziParams pr(1.8, 0.35);
    const auto fwd = make_state(pr, Interval(0.2), -0.7, 0.9, 0.1);
    // Exact negation gives the same physical segment with the frame turned by
    // pi; computing the angle as 0.2 + pi in doubles would not.
    auto bwd = fwd;
    bwd.Q = Rotation2{-fwd.Q.c, -fwd.Q.s};
    bwd.xp = -fwd.xq;
    bwd.xq = -fwd.xp;
    bwd.yshared = -fwd.yshared;
    bwd.dir = false;
    const auto a = condmix::slice_sample(fwd, 0.05);
    const auto b = condmix::slice_sample(bwd, 0.05);
    ASSERT_TRUE(a.has_value());
    ASSERT_TRUE(b.has_value());
    EXPECT_FALSE(intersect(a->point.y, b->point.y).is_empty());
    EXPECT_FALSE(intersect(a->weight, b->weight).is_empty());
}

}  // namespace
