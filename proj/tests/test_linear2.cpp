#include <gtest/gtest.h>

#include <random>

#include "condmix/interval/linear2.hpp"

using namespace condmix;

namespace {

constexpr mpfr_prec_t kP = 196;

Interval I(double lo, double hi) { return Interval(lo, hi, kP); }

// Exact-direction factorization of a point matrix at 4x precision: the Givens
// angle of the first column, its cosine/sine, and R = Q^T M.
struct PointQr {
    MpReal c, s, r11, r12, r22;
};

PointQr point_qr(double m11, double m12, double m21, double m22) {
    mpfr_prec_t hp = 4 * kP;
    MpReal a(m11, hp), b(m12, hp), c(m21, hp), d(m22, hp);
    MpReal th = atan2(c, a);
    MpReal cc = cos(th), ss = sin(th);
    return {cc, ss, cc * a + ss * c, cc * b + ss * d, cc * d - ss * b};
}

} // namespace

TEST(Qr2, IdentityMatrix) {
    auto [q, r] = qr2(IntervalMat2::identity(kP));
    EXPECT_TRUE(q.c.contains(1.0) && q.s.contains(0.0));
    EXPECT_TRUE(r.r11.contains(1.0) && r.r12.contains(0.0) && r.r22.contains(1.0));
    EXPECT_LT(q.c.width(), 1e-50);
}

TEST(Qr2, PureRotation) {
    // [[0,-1],[1,0]] is a 90-degree rotation; R must enclose the identity.
    IntervalMat2 m(0.0, -1.0, 1.0, 0.0, kP);
    auto [q, r] = qr2(m);
    EXPECT_TRUE(q.c.contains(0.0) && q.s.contains(1.0));
    EXPECT_TRUE(r.r11.contains(1.0));
    EXPECT_TRUE(r.r12.contains(0.0));
    EXPECT_TRUE(r.r22.contains(1.0));
    EXPECT_LT(r.r11.width(), 1e-50);
}

TEST(Qr2, SingularColumnRejected) {
    IntervalMat2 m(I(-0.1, 0.1), I(1, 1), I(-0.1, 0.1), I(1, 1));
    EXPECT_THROW(qr2(m), SingularError);
}

TEST(Qr2, WidthBudgetEnforced) {
    IntervalMat2 m(I(1.0, 1.001), I(0, 0), I(0.5, 0.501), I(1, 1));
    EXPECT_THROW(qr2(m, 1e-12), StabilityError);
    EXPECT_NO_THROW(qr2(m, 8.0));
}

TEST(Qr2, BranchCutColumn) {
    // first column pointing left with sign-ambiguous second entry exercises
    // the flipped-angle path
    IntervalMat2 m(I(-2, -2), I(0.3, 0.3), I(-1e-3, 1e-3), I(1, 1));
    auto [q, r] = qr2(m);
    EXPECT_TRUE(q.c.contains(-1.0) || q.c.hi().to_double() < -0.99);
    for (double eps : {-1e-4, 0.0, 1e-4}) {
        PointQr o = point_qr(-2, 0.3, eps, 1);
        EXPECT_TRUE(q.c.contains(o.c)) << eps;
        EXPECT_TRUE(q.s.contains(o.s)) << eps;
        EXPECT_TRUE(r.r11.contains(o.r11)) << eps;
        EXPECT_TRUE(r.r12.contains(o.r12)) << eps;
        EXPECT_TRUE(r.r22.contains(o.r22)) << eps;
    }
}

TEST(Qr2, RandomContainmentAndOrthogonality) {
    std::mt19937_64 g(20260823);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_int_distribution<int> wexp(-45, -20);
    int done = 0;
    while (done < 400) {
        double m11 = u(g), m12 = u(g), m21 = u(g), m22 = u(g);
        if (m11 * m11 + m21 * m21 < 0.04) continue;  // keep the column certified nonzero
        double w = std::ldexp(1.0, wexp(g));
        IntervalMat2 m(I(m11 - w, m11 + w), I(m12 - w, m12 + w),
                       I(m21 - w, m21 + w), I(m22 - w, m22 + w));
        if (m.m11.contains_zero() && m.m21.contains_zero()) continue;
        // loose budget: short first columns amplify the angle width by ~1/norm,
        // so the general fuzz checks containment, not the default budget
        auto [q, r] = qr2(m, 100.0);

        PointQr o = point_qr(m11, m12, m21, m22);
        EXPECT_TRUE(q.c.contains(o.c));
        EXPECT_TRUE(q.s.contains(o.s));
        EXPECT_TRUE(r.r11.contains(o.r11));
        EXPECT_TRUE(r.r12.contains(o.r12));
        EXPECT_TRUE(r.r22.contains(o.r22));

        // reconstruction encloses the input
        IntervalMat2 qr_mat = q.to_mat() * r.to_mat();
        EXPECT_TRUE(qr_mat.contains(m));

        // rotation invariants
        EXPECT_TRUE(q.sq_norm().contains(1.0));
        IntervalMat2 qqt = q.to_mat() * q.to_mat().transpose();
        EXPECT_TRUE(qqt.contains(IntervalMat2::identity(kP)));

        // r11 encloses a positive magnitude
        EXPECT_TRUE(r.r11.certainly_positive());
        ++done;
    }
}

TEST(Qr2, DefaultBudgetHoldsForDynamicsShapedInputs) {
    // matrices of the form J*Q for the piecewise-affine dynamics: column norm
    // comparable to entry size, where the default factor-8 budget must hold
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> ang(-0.5, 0.5);
    std::uniform_int_distribution<int> wexp(-50, -30);
    for (int i = 0; i < 200; ++i) {
        double a = 1.8, b = 0.35, sgn = (g() & 1) ? 1.0 : -1.0;
        double c0 = std::cos(ang(g)), s0 = std::sin(ang(g));
        double w = std::ldexp(1.0, wexp(g));
        auto wi = [&](double x) { return I(x - w, x + w); };
        IntervalMat2 m(wi(-sgn * a * c0 + s0), wi(sgn * a * s0 + c0),
                       wi(b * c0), wi(-b * s0));
        EXPECT_NO_THROW(qr2(m)) << i;
    }
}

TEST(Qr2, MidpointAgreement) {
    // exact double inputs: midpoint of Q*R agrees with the input to far below
    // double resolution (the enclosures are a few ulps wide at 196 bits)
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        double m11 = u(g), m12 = u(g), m21 = u(g), m22 = u(g);
        if (m11 * m11 + m21 * m21 < 0.04) continue;
        IntervalMat2 m(m11, m12, m21, m22, kP);
        auto [q, r] = qr2(m);
        IntervalMat2 qr_mat = q.to_mat() * r.to_mat();
        double tol = std::ldexp(1.0, -(kP - 12));
        EXPECT_NEAR((qr_mat.m11.midpoint() - MpReal(m11, kP)).to_double(), 0.0, tol);
        EXPECT_NEAR((qr_mat.m12.midpoint() - MpReal(m12, kP)).to_double(), 0.0, tol);
        EXPECT_NEAR((qr_mat.m21.midpoint() - MpReal(m21, kP)).to_double(), 0.0, tol);
        EXPECT_NEAR((qr_mat.m22.midpoint() - MpReal(m22, kP)).to_double(), 0.0, tol);
        EXPECT_LT(qr_mat.max_width(), 1e-50);
    }
}

TEST(Vec2Mat2, Plumbing) {
    IntervalVec2 v(1.0, 2.0, kP);
    IntervalMat2 m(0.0, 1.0, 1.0, 0.0, kP);
    IntervalVec2 mv = m * v;
    EXPECT_TRUE(mv.x.contains(2.0) && mv.y.contains(1.0));
    Rotation2 id = Rotation2::identity(kP);
    IntervalVec2 r = id.apply(v);
    EXPECT_TRUE(r.x.contains(1.0) && r.y.contains(2.0));
    IntervalVec2 rt = id.apply_transpose(v);
    EXPECT_TRUE(rt.x.contains(1.0) && rt.y.contains(2.0));
    EXPECT_TRUE(hull(v, IntervalVec2(3.0, -1.0, kP)).x.contains(2.5));
}
