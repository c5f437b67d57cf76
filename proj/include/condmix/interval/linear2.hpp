#pragma once

#include "condmix/interval/interval.hpp"

namespace condmix {

struct IntervalVec2 {
    Interval x, y;

    explicit IntervalVec2(mpfr_prec_t prec = default_precision()) : x(prec), y(prec) {}
    IntervalVec2(Interval x_, Interval y_) : x(std::move(x_)), y(std::move(y_)) {}
    IntervalVec2(double x_, double y_, mpfr_prec_t prec)
        : x(x_, prec), y(y_, prec) {}

    friend IntervalVec2 operator+(const IntervalVec2& a, const IntervalVec2& b) {
        return {a.x + b.x, a.y + b.y};
    }
    friend IntervalVec2 operator-(const IntervalVec2& a, const IntervalVec2& b) {
        return {a.x - b.x, a.y - b.y};
    }
    friend IntervalVec2 operator*(const Interval& s, const IntervalVec2& v) {
        return {s * v.x, s * v.y};
    }
    double max_width() const { return std::max(x.width(), y.width()); }
    bool contains(const IntervalVec2& o) const { return x.contains(o.x) && y.contains(o.y); }
    friend IntervalVec2 hull(const IntervalVec2& a, const IntervalVec2& b) {
        return {hull(a.x, b.x), hull(a.y, b.y)};
    }
    friend IntervalVec2 intersect(const IntervalVec2& a, const IntervalVec2& b) {
        return {intersect(a.x, b.x), intersect(a.y, b.y)};
    }
};

struct IntervalMat2 {
    Interval m11, m12, m21, m22;  // row-major

    explicit IntervalMat2(mpfr_prec_t prec = default_precision())
        : m11(prec), m12(prec), m21(prec), m22(prec) {}
    IntervalMat2(Interval a, Interval b, Interval c, Interval d)
        : m11(std::move(a)), m12(std::move(b)), m21(std::move(c)), m22(std::move(d)) {}
    IntervalMat2(double a, double b, double c, double d, mpfr_prec_t prec)
        : m11(a, prec), m12(b, prec), m21(c, prec), m22(d, prec) {}

    static IntervalMat2 identity(mpfr_prec_t prec = default_precision()) {
        return {1.0, 0.0, 0.0, 1.0, prec};
    }

    friend IntervalMat2 operator*(const IntervalMat2& a, const IntervalMat2& b) {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
    friend IntervalVec2 operator*(const IntervalMat2& a, const IntervalVec2& v) {
        return {a.m11 * v.x + a.m12 * v.y, a.m21 * v.x + a.m22 * v.y};
    }
    IntervalMat2 transpose() const { return {m11, m21, m12, m22}; }
    double max_width() const {
        return std::max(std::max(m11.width(), m12.width()),
                        std::max(m21.width(), m22.width()));
    }
    bool contains(const IntervalMat2& o) const {
        return m11.contains(o.m11) && m12.contains(o.m12) && m21.contains(o.m21) &&
               m22.contains(o.m22);
    }
};

// Rotation [[c,-s],[s,c]] stored as enclosures of cosine and sine of one angle,
// so c^2 + s^2 always encloses 1.
struct Rotation2 {
    Interval c, s;

    explicit Rotation2(mpfr_prec_t prec = default_precision())
        : c(1.0, prec), s(0.0, prec) {}
    Rotation2(Interval c_, Interval s_) : c(std::move(c_)), s(std::move(s_)) {}

    static Rotation2 identity(mpfr_prec_t prec = default_precision()) { return Rotation2(prec); }
    static Rotation2 from_angle(const Interval& theta) {
        return {cos(theta), sin(theta)};
    }

    IntervalMat2 to_mat() const { return {c, -s, s, c}; }
    IntervalVec2 apply(const IntervalVec2& v) const {
        return {c * v.x - s * v.y, s * v.x + c * v.y};
    }
    IntervalVec2 apply_transpose(const IntervalVec2& v) const {
        return {c * v.x + s * v.y, c * v.y - s * v.x};
    }
    Interval sq_norm() const { return c * c + s * s; }
    double max_width() const { return std::max(c.width(), s.width()); }
};

struct UpperTri2 {
    Interval r11, r12, r22;  // r21 is identically zero by construction

    explicit UpperTri2(mpfr_prec_t prec = default_precision())
        : r11(1.0, prec), r12(0.0, prec), r22(1.0, prec) {}
    UpperTri2(Interval a, Interval b, Interval c)
        : r11(std::move(a)), r12(std::move(b)), r22(std::move(c)) {}

    IntervalMat2 to_mat() const {
        Interval zero(0.0, r11.precision());
        return {r11, r12, zero, r22};
    }
    double max_width() const {
        return std::max(std::max(r11.width(), r12.width()), r22.width());
    }
};

struct Qr2Result {
    Rotation2 q;
    UpperTri2 r;
};

// QR factorization of a 2x2 interval matrix through a single Givens angle
// theta = atan2(m21, m11). For every point matrix inside m the exact factor
// has r21 = 0 at its own angle, and that angle lies inside theta, so forcing
// r21 = 0 keeps the containment contract. Computing c and s from one angle
// keeps c^2+s^2 tight around 1, which entrywise enclosures of Q would lose.
inline Qr2Result qr2(const IntervalMat2& m, double width_factor = 8.0) {
    mpfr_prec_t p = m.m11.precision();
    if (m.m11.contains_zero() && m.m21.contains_zero())
        throw SingularError("qr2: first column may contain the origin");
    Interval theta(p);
    if (m.m21.contains_zero() && m.m11.certainly_negative()) {
        // The column box would cross the atan2 branch cut; rotate the input by
        // pi so the flipped box sits in the right half plane. Same rotation,
        // angle shifted by 2*pi at most.
        Interval pi_i(p);
        {
            MpReal lo(p), hi(p);
            mpfr_const_pi(lo.raw(), MPFR_RNDD);
            mpfr_const_pi(hi.raw(), MPFR_RNDU);
            pi_i = Interval(lo, hi);
        }
        theta = atan2(-m.m21, -m.m11) + pi_i;
    } else {
        theta = atan2(m.m21, m.m11);
    }
    Rotation2 q = Rotation2::from_angle(theta);
    Interval r11 = q.c * m.m11 + q.s * m.m21;
    // hypot of the first column encloses the same exact value; intersecting
    // tightens without losing containment.
    r11 = intersect(r11, hypot(m.m11, m.m21));
    if (r11.is_empty())
        throw StabilityError("qr2: inconsistent r11 enclosures");
    Interval r12 = q.c * m.m12 + q.s * m.m22;
    Interval r22 = q.c * m.m22 - q.s * m.m12;
    double win = m.max_width();
    double wout = std::max({q.c.width(), q.s.width(), r11.width(), r12.width(), r22.width()});
    // Additive allowance for directed-rounding noise on exact inputs.
    double floor_w = std::max(std::ldexp(1.0, int(10 - p)), 1e-300) *
                     std::max(1.0, m.m11.mag() + m.m21.mag());
    if (wout > width_factor * win + floor_w)
        throw StabilityError("qr2: output widths exceed budget");
    return {std::move(q), UpperTri2{std::move(r11), std::move(r12), std::move(r22)}};
}

} // namespace condmix
